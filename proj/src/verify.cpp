#include "qfi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfi/errors.hpp"
#include "qfi/multi.hpp"

namespace qfi::verify {

namespace {

constexpr double kMargin = 0.05;

struct CaseOutcome {
  int checks = 0;
  bool skipped = false;
  double worst_ratio = 0.0;
  std::vector<Failure> failures;
  std::string note;
};

struct Checker {
  CaseOutcome& out;
  std::string channel;
  std::vector<double> theta;

  // Passes when value <= limit.
  void operator()(const std::string& check, double value, double limit, const std::string& detail = {}) const {
    ++out.checks;
    const double ratio = limit > 0.0 ? value / limit : (value > 0.0 ? INFINITY : 0.0);
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    if (!(value <= limit)) out.failures.push_back({check, channel, theta, value, limit, detail});
  }
};

template <typename CaseFn>
SuiteResult run_cases(const std::string& name, int count, estimation::Execution execution, CaseFn fn) {
  std::vector<CaseOutcome> outcomes(static_cast<std::size_t>(count));
  const bool parallel = execution == estimation::Execution::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < count; ++i) {
    CaseOutcome& o = outcomes[static_cast<std::size_t>(i)];
    try {
      fn(i, o);
    } catch (const DegeneracyError& e) {
      o.skipped = true;
      o.note = std::string("case ") + std::to_string(i) + " skipped: " + e.what();
    } catch (const std::exception& e) {
      o.failures.push_back({"evaluation", "case " + std::to_string(i), {}, 0.0, 0.0, e.what()});
    }
  }
  SuiteResult result;
  result.name = name;
  result.cases = count;
  for (auto& o : outcomes) {
    result.checks += o.checks;
    if (o.skipped) ++result.skipped;
    result.worst_ratio = std::max(result.worst_ratio, o.worst_ratio);
    for (auto& f : o.failures) result.failures.push_back(std::move(f));
    if (!o.note.empty()) result.notes.push_back(o.note);
  }
  return result;
}

double relative_limit(double scale, double rel) { return rel * std::max(std::abs(scale), 1e-12); }

std::string describe(const std::vector<double>& v) {
  std::ostringstream s;
  s.precision(6);
  s << "(";
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
  s << ")";
  return s.str();
}

ParametricChannel multi_channel(const SuiteConfig& cfg, int index, randomized::Engine& rng, std::string& label) {
  const int dim = 2 + index % (cfg.max_dim - 1);
  const int env = 1 + (index / (cfg.max_dim - 1)) % cfg.max_env;
  label = "random2(d=" + std::to_string(dim) + ",env=" + std::to_string(env) + ",#" + std::to_string(index) + ")";
  return randomized::random_kraus_channel(dim, env, 2, rng);
}

}  // namespace

Suite parse_suite(const std::string& name) {
  if (name == "gap") return Suite::Gap;
  if (name == "ordering") return Suite::Ordering;
  if (name == "routes") return Suite::Routes;
  if (name == "directional") return Suite::Directional;
  if (name == "all") return Suite::All;
  throw ValidationError("unknown suite '" + name + "' (expected gap, ordering, routes, directional or all)");
}

const char* to_string(Suite s) {
  switch (s) {
    case Suite::Gap: return "gap";
    case Suite::Ordering: return "ordering";
    case Suite::Routes: return "routes";
    case Suite::Directional: return "directional";
    case Suite::All: return "all";
  }
  return "unknown";
}

randomized::Engine case_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return randomized::Engine(seq);
}

ParametricChannel suite_channel(const SuiteConfig& cfg, int index, randomized::Engine& rng, std::string& label) {
  if (cfg.max_dim < 2 || cfg.max_env < 1) throw ValidationError("suite needs max_dim >= 2 and max_env >= 1");
  const int dim = 2 + index % (cfg.max_dim - 1);
  const int env = 1 + (index / (cfg.max_dim - 1)) % cfg.max_env;
  label = "random(d=" + std::to_string(dim) + ",env=" + std::to_string(env) + ",#" + std::to_string(index) + ")";
  return randomized::random_kraus_channel(dim, env, 1, rng);
}

SuiteResult run_gap_suite(const SuiteConfig& cfg) {
  return run_cases("gap", cfg.channels, cfg.execution, [&](int i, CaseOutcome& o) {
    auto rng = case_engine(cfg.seed, static_cast<std::uint64_t>(i));
    std::string label;
    const ParametricChannel ch = suite_channel(cfg, i, rng, label);
    const ParamPoint theta = randomized::random_interior_point(ch, kMargin, rng);
    const Checker check{o, label, theta};
    const auto canon = bounds::canonical_kraus(ch, theta, {1.0}, cfg.diff);
    const auto sc = bounds::curve_from_canonical(canon, ch.input_state(), theta);
    sc.validate();
    const double c = bounds::sm_bound_kraus(canon.ops, canon.derivative, DensityMatrix(ch.input_state()));
    const double h = bounds::sld_information(sc);
    const double gap = bounds::gap_formula(sc);
    std::ostringstream detail;
    detail.precision(17);
    detail << "C=" << c << " H=" << h << " gap=" << gap;
    check("gap identity |(C - H) - gap|", std::abs((c - h) - gap), 1e-8 * std::max(1.0, c), detail.str());
  });
}

SuiteResult run_ordering_suite(const SuiteConfig& cfg) {
  return run_cases("ordering", cfg.channels, cfg.execution, [&](int i, CaseOutcome& o) {
    auto rng = case_engine(cfg.seed, static_cast<std::uint64_t>(i));
    std::string label;
    const ParametricChannel ch = suite_channel(cfg, i, rng, label);
    const ParamPoint theta = randomized::random_interior_point(ch, kMargin, rng);
    const Checker check{o, label, theta};
    const std::vector<double> dir{1.0};
    const auto canon = bounds::canonical_kraus(ch, theta, dir, cfg.diff);
    const auto sc = bounds::curve_from_canonical(canon, ch.input_state(), theta);
    sc.validate();
    const DensityMatrix rho0(ch.input_state());
    const double h = bounds::sld_information(sc);
    const double c = bounds::sm_bound_kraus(canon.ops, canon.derivative, rho0);
    check("H <= C_upsilon", h - c, 1e-8);

    std::uniform_int_distribution<int> outcomes(2, ch.dim() + 2);
    for (int m = 0; m < cfg.povms_per_channel; ++m) {
      const POVM povm = randomized::random_povm(ch.dim(), outcomes(rng), rng);
      const double f = bounds::fisher_information(ch, povm, theta, dir, cfg.diff).value;
      check("F <= H (random POVM)", f - h, 1e-7);
    }

    auto c_e = [&](const ParametricChannel& rep) {
      return bounds::sm_bound_kraus(rep.raw_kraus(theta), kraus_derivative(rep, theta, 0, cfg.diff), rho0);
    };
    check("H <= C_E (own Kraus set)", h - c_e(ch), 1e-8);
    check("H <= C_E (fixed remixing)", h - c_e(randomized::random_remixing(ch, false, rng)), 1e-8);
    check("H <= C_E (theta-dependent remixing)", h - c_e(randomized::random_remixing(ch, true, rng)), 1e-8);

    const ComplexMatrix sld = bounds::sld_score(sc);
    const RealVector eig = linalg::hermitian_eigendecompose(sld).values;
    const double scale = std::max(1.0, eig.cwiseAbs().maxCoeff());
    bool nondegenerate = true;
    for (Eigen::Index k = 1; k < eig.size(); ++k)
      if (eig[k] - eig[k - 1] < 1e-6 * scale) nondegenerate = false;
    if (nondegenerate) {
      const double f = bounds::fisher_information(ch, bounds::optimal_povm_from_sld(sld), theta, dir, cfg.diff).value;
      check("SLD-eigenbasis F = H", std::abs(f - h), relative_limit(h, 1e-5));
    }
  });
}

SuiteResult run_routes_suite(const SuiteConfig& cfg) {
  return run_cases("routes", cfg.channels, cfg.execution, [&](int i, CaseOutcome& o) {
    auto rng = case_engine(cfg.seed, static_cast<std::uint64_t>(i));
    std::string label;
    const ParametricChannel ch = suite_channel(cfg, i, rng, label);
    const ParamPoint theta = randomized::random_interior_point(ch, kMargin, rng);
    const Checker check{o, label, theta};
    const auto canon = bounds::canonical_kraus(ch, theta, {1.0}, cfg.diff);
    const auto sc = bounds::curve_from_canonical(canon, ch.input_state(), theta);
    sc.validate();
    const double kraus = bounds::sm_bound_kraus(canon.ops, canon.derivative, DensityMatrix(ch.input_state()));
    const double spectral = bounds::sm_bound_spectral(sc);
    check("C_upsilon Kraus route vs spectral route", std::abs(kraus - spectral), relative_limit(kraus, 1e-6));
  });
}

SuiteResult run_directional_suite(const SuiteConfig& cfg) {
  return run_cases("directional", cfg.multi_channels, cfg.execution, [&](int i, CaseOutcome& o) {
    auto rng = case_engine(cfg.seed ^ 0xD1CEULL, static_cast<std::uint64_t>(i));
    std::string label;
    const ParametricChannel ch = multi_channel(cfg, i, rng, label);
    const ParamPoint theta = randomized::random_interior_point(ch, kMargin, rng);
    const Checker check{o, label, theta};
    const auto msc = bounds::multi_spectral_curve(ch, theta, cfg.diff);
    const auto h = bounds::sld_matrix(msc);
    const auto c = bounds::sm_matrix(ch, theta, cfg.diff);
    const POVM povm = randomized::random_povm(ch.dim(), ch.dim() + 1, rng);
    const auto f = bounds::fisher_matrix(ch, povm, theta, cfg.diff);
    const auto report = bounds::loewner_report(f, h, c);
    check("F <= H (Loewner slack)", -report.fisher_le_sld->min_eigenvalue, 1e-8);
    check("H <= C_upsilon (Loewner slack)", -report.sld_le_sm.min_eigenvalue, 1e-8);
    check("F <= C_upsilon (Loewner slack)", -report.fisher_le_sm->min_eigenvalue, 1e-8);

    for (int l = 0; l < ch.param_count(); ++l) {
      std::vector<double> e(static_cast<std::size_t>(ch.param_count()), 0.0);
      e[static_cast<std::size_t>(l)] = 1.0;
      const auto axis = bounds::directional_reduction_check(ch, theta, e, cfg.diff);
      check("axis slice reproduces matrix diagonal", axis.max_relative_error, 1e-8, "direction " + describe(e));
    }
    for (int k = 0; k < cfg.directions; ++k) {
      const auto v = randomized::random_direction(ch.param_count(), rng);
      const auto dr = bounds::directional_reduction_check(ch, theta, v, cfg.diff);
      check("directional reduction", dr.max_relative_error, 1e-5, "direction " + describe(v));
    }
  });
}

std::vector<SuiteResult> run_suites(Suite suite, const SuiteConfig& cfg) {
  std::vector<SuiteResult> out;
  if (suite == Suite::Gap || suite == Suite::All) out.push_back(run_gap_suite(cfg));
  if (suite == Suite::Ordering || suite == Suite::All) out.push_back(run_ordering_suite(cfg));
  if (suite == Suite::Routes || suite == Suite::All) out.push_back(run_routes_suite(cfg));
  if (suite == Suite::Directional || suite == Suite::All) out.push_back(run_directional_suite(cfg));
  return out;
}

}  // namespace qfi::verify
