// Acceptance criteria: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--known-red N]...
// Exit status is 0 when the failing criteria are exactly the declared
// known-red set, so a known-red criterion that starts passing is also flagged.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qfi/bounds.hpp"
#include "qfi/estimation.hpp"
#include "qfi/multi.hpp"
#include "qfi/report.hpp"
#include "qfi/verify.hpp"

using namespace qfi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

POVM plus_minus() {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix u(2, 2);
  u << s, s, s, -s;
  return POVM::from_basis(u);
}

bounds::PovmChoice fixed(POVM p) {
  bounds::PovmChoice c;
  c.kind = bounds::PovmChoice::Kind::Fixed;
  c.povm = std::move(p);
  return c;
}

std::string suite_detail(const verify::SuiteResult& r, double secs) {
  std::ostringstream out;
  out << r.checks << " checks over " << r.cases << " channels, " << r.failures.size() << " failures, " << r.skipped
      << " skipped, worst residual/limit " << r.worst_ratio << ", " << secs << " s";
  if (!r.failures.empty()) {
    const auto& f = r.failures.front();
    out << "; first failure " << f.check << " on " << f.channel << " value " << f.value << " limit " << f.limit;
  }
  return out.str();
}

// 1. Example 1: H = C_upsilon = 4 / (1 - t^2), gap and residual below 1e-9.
Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  const ParametricChannel ch = builtin("example1");
  bool equal = true;
  bool closed = true;
  double worst_closed = 0.0;
  double worst_equal = 0.0;
  double worst_gap = 0.0;
  double worst_res = 0.0;
  for (double t : {0.2, 0.4, 0.6, 0.8}) {
    const auto r = bounds::one_parameter_report(ch, ParamPoint{t}, {});
    const double want = 4.0 / (1.0 - t * t);
    worst_closed = std::max({worst_closed, rel_err(r.sld, want), rel_err(r.sm, want)});
    worst_equal = std::max(worst_equal, rel_err(r.sld, r.sm));
    worst_gap = std::max(worst_gap, std::abs(r.gap));
    worst_res = std::max(worst_res, r.attainability.residual);
  }
  equal = worst_equal < 1e-7 && worst_gap < 1e-9 && worst_res < 1e-9;
  closed = worst_closed < 1e-7;
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << "H = C_upsilon rel " << worst_equal << ", gap " << worst_gap << ", residual " << worst_res
    << "; closed form 4/(1-t^2) rel error " << worst_closed << " (both bounds equal 4(1+t^2)/(1-t^2) because v1(t)"
    << " moves out of the support), " << secs << " s";
  return {equal && closed && secs < 1.0, d.str()};
}

// 2. Dephasing on |+>: F(+-) = H = C_upsilon = 1/(theta(1-theta)); SLD POVM condition holds.
Outcome criterion2() {
  const auto start = std::chrono::steady_clock::now();
  const ParametricChannel ch = builtin("dephasing");
  double worst = 0.0;
  bool condition = true;
  for (int i = 1; i <= 9; ++i) {
    const double t = 0.1 * i;
    const auto r = bounds::one_parameter_report(ch, ParamPoint{t}, fixed(plus_minus()));
    const double want = 1.0 / (t * (1.0 - t));
    worst = std::max({worst, rel_err(*r.fisher, want), rel_err(r.sld, want), rel_err(r.sm, want)});
    condition = condition && r.sld_condition && r.sld_condition->satisfied;
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << "max rel error " << worst << ", SLD condition " << (condition ? "satisfied" : "violated") << ", " << secs
    << " s";
  return {worst < 1e-6 && condition && secs < 1.0, d.str()};
}

// 3. Unitary condition on z and x rotations.
Outcome criterion3() {
  FamilyOptions x;
  x.axis = 'x';
  const ParametricChannel rz = builtin("rotation");
  const ParametricChannel rx = builtin("rotation", x);
  const PureState plus = PureState::normalized(ComplexVector::Ones(2));
  const ParamPoint theta{0.7};
  bool ok = true;
  std::ostringstream d;

  const auto u0 = bounds::unitary_attainability(rz, theta, 1e-8);
  const auto r0 = bounds::one_parameter_report(rz, theta, {});
  const bool first = std::abs(u0.value - Complex(0.0, 0.5)) < 1e-8 && std::abs(r0.sld) < 1e-8 &&
                     std::abs(r0.sm - 1.0) < 1e-8 && std::abs(r0.gap - 1.0) < 1e-8;
  d << "z on |0>: value " << u0.value.real() << (u0.value.imag() < 0 ? "" : "+") << u0.value.imag() << "i, H "
    << r0.sld << ", C " << r0.sm << ", gap " << r0.gap;
  ok = ok && first;
  for (const auto& [label, ch] : {std::pair{"z on |+>", rz.with_input(plus)}, std::pair{"x on |0>", rx}}) {
    const auto u = bounds::unitary_attainability(ch, theta, 1e-8);
    const auto r = bounds::one_parameter_report(ch, theta, {});
    const bool good = std::abs(u.value) < 1e-8 && std::abs(r.sld - r.sm) < 1e-8;
    d << "; " << label << ": |value| " << std::abs(u.value) << ", |H - C| " << std::abs(r.sld - r.sm);
    ok = ok && good;
  }
  return {ok, d.str()};
}

verify::SuiteConfig suite_config() { return verify::SuiteConfig{}; }

// 4. Gap identity over the randomized suite.
Outcome criterion4() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = verify::run_gap_suite(suite_config());
  const double secs = seconds_since(start);
  return {r.passed() && r.cases == 200 && secs < 60.0, suite_detail(r, secs)};
}

// 5. Ordering, remixing and SLD-basis optimality over the randomized suite.
Outcome criterion5() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = verify::run_ordering_suite(suite_config());
  const double secs = seconds_since(start);
  return {r.passed() && r.cases == 200, suite_detail(r, secs)};
}

// 6. Kraus-route vs spectral-route C_upsilon.
Outcome criterion6() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = verify::run_routes_suite(suite_config());
  const double secs = seconds_since(start);
  return {r.passed() && r.cases == 200, suite_detail(r, secs)};
}

// 7. Penalty of a theta-dependent remixing of dephasing.
Outcome criterion7() {
  const ParametricChannel base = builtin("dephasing");
  ComplexMatrix gen(2, 2);
  gen << 0.3, Complex(0.4, -0.2), Complex(0.4, 0.2), -0.5;
  const ParametricChannel mixed = remix(base, ProductExponential(ComplexMatrix::Identity(2, 2), {gen}));
  double worst = 0.0;
  double worst_literal = 0.0;
  for (double t : {0.15, 0.3, 0.55, 0.8}) {
    const ParamPoint theta{t};
    const DensityMatrix rho0(mixed.input_state());
    const double c_e = bounds::sm_bound_kraus(mixed.raw_kraus(theta), kraus_derivative(mixed, theta, 0), rho0);
    const double c_u = bounds::one_parameter_report(base, theta, {}).sm;
    // Family operators of dephasing on |+> already have a diagonal Gram
    // matrix with weights (1 - t, t); u' = -i G exp(-i t G).
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gen);
    const ComplexMatrix u = es.eigenvectors() *
                            (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix().asDiagonal() *
                            es.eigenvectors().adjoint();
    const ComplexMatrix du = Complex(0.0, -1.0) * gen * u;
    const double p[2] = {1.0 - t, t};
    double penalty = 0.0;
    double literal = 0.0;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        penalty += 4.0 * p[k] * std::norm(du(j, k));
        literal += 4.0 * p[j] * std::norm(du(j, k));
      }
    worst = std::max(worst, rel_err(c_e - c_u, penalty));
    worst_literal = std::max(worst_literal, rel_err(c_e - c_u, literal));
  }
  std::ostringstream d;
  d << "C_E - C_upsilon vs 4 sum_jk p_k |u_jk'|^2 (E_j = sum_k u_jk Y_k): max rel error " << worst
    << "; weighting by the row index instead gives " << worst_literal;
  return {worst < 1e-6, d.str()};
}

// 8. Example 2 and the two-parameter suite.
Outcome criterion8() {
  const auto start = std::chrono::steady_clock::now();
  const ParametricChannel ex2 = builtin("example2");
  double worst_diff = 0.0;
  double worst_res = 0.0;
  for (const ParamPoint& theta : {ParamPoint{0.6, 0.3}, ParamPoint{0.25, 0.7}, ParamPoint{0.5, 0.5}}) {
    const auto msc = bounds::multi_spectral_curve(ex2, theta);
    const auto h = bounds::sld_matrix(msc);
    const auto c = bounds::sm_matrix(msc);
    worst_diff = std::max(worst_diff, linalg::max_abs(h.entries - c.entries));
    worst_res = std::max(worst_res, bounds::multi_attainability_check(msc, 1e-9).residual);
  }
  const auto r = verify::run_directional_suite(suite_config());
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << "Example 2 max |H - C| " << worst_diff << ", residual " << worst_res << "; " << suite_detail(r, secs);
  return {worst_diff < 1e-8 && worst_res < 1e-9 && r.passed() && r.cases == 50 && secs < 120.0, d.str()};
}

// 9. Monte-Carlo variance against 1/(N H), fixed and adaptive.
Outcome criterion9() {
  const auto start = std::chrono::steady_clock::now();
  const ParametricChannel ch = builtin("dephasing");
  const double theta = 0.2;
  estimation::ExperimentConfig cfg;
  cfg.shots = 10000;
  cfg.replications = 200;
  cfg.seed = 42;
  const POVM sld_povm =
      bounds::optimal_povm_from_sld(bounds::sld_score(bounds::spectral_curve(ch, ParamPoint{theta}, {1.0})));
  const auto fixed_run = estimation::cr_experiment(ch, theta, sld_povm, "sld", cfg);
  const auto again = estimation::cr_experiment(ch, theta, sld_povm, "sld", cfg);
  estimation::AdaptiveConfig acfg;
  acfg.n_pilot = 500;
  const auto adaptive = estimation::adaptive_two_stage(ch, theta, acfg, cfg);
  const auto adaptive_again = estimation::adaptive_two_stage(ch, theta, acfg, cfg);
  const double secs = seconds_since(start);

  const double h = 1.0 / (theta * (1.0 - theta));
  const double ratio_fixed = fixed_run.variance / (1.0 / (cfg.shots * h));
  const double ratio_adaptive = adaptive.variance / (1.0 / ((cfg.shots - acfg.n_pilot) * h));
  auto dump = [](const estimation::EstimationRun& r) { return report::dump(report::to_json(r)); };
  const bool reproducible = dump(fixed_run) == dump(again) && dump(adaptive) == dump(adaptive_again);
  std::ostringstream d;
  d << "variance ratio fixed " << ratio_fixed << ", adaptive " << ratio_adaptive << ", reproducible "
    << (reproducible ? "yes" : "no") << ", " << secs << " s";
  const bool ok = ratio_fixed >= 0.85 && ratio_fixed <= 1.15 && ratio_adaptive >= 0.85 && ratio_adaptive <= 1.15 &&
                  reproducible && secs < 120.0;
  return {ok, d.str()};
}

CustomSpectral sample_custom() {
  CustomSpectral cs;
  cs.dim = 3;
  cs.params = 1;
  cs.p0 = RealVector(3);
  cs.p0 << 0.5, 0.3, 0.2;
  cs.slopes = {RealVector(3)};
  cs.slopes[0] << -0.2, 0.1, 0.1;
  cs.basis = ComplexMatrix::Identity(3, 3);
  ComplexMatrix g = ComplexMatrix::Zero(3, 3);
  g(0, 1) = g(1, 0) = 0.5;
  g(1, 2) = Complex(0.0, 0.2);
  g(2, 1) = Complex(0.0, -0.2);
  cs.generators = {g};
  return cs;
}

// 10. Analytic vs finite-difference derivatives of every built-in.
Outcome criterion10() {
  const linalg::DiffConfig cfg;
  double worst = 0.0;
  std::string worst_family;
  for (const auto& family : builtin_families()) {
    FamilyOptions options;
    if (family == "custom-spectral") options.custom = sample_custom();
    const ParametricChannel ch = builtin(family, options);
    const Domain& dom = ch.domain();
    for (double frac : {0.23, 0.5, 0.71}) {
      ParamPoint theta(static_cast<std::size_t>(ch.param_count()));
      for (int l = 0; l < ch.param_count(); ++l) {
        const auto i = static_cast<std::size_t>(l);
        theta[i] = dom.lo[i] + (frac + 0.07 * l) * (dom.hi[i] - dom.lo[i]);
      }
      for (int l = 0; l < ch.param_count(); ++l) {
        auto moved = [&](double s) {
          ParamPoint p = theta;
          p[static_cast<std::size_t>(l)] += s;
          return p;
        };
        std::vector<ComplexMatrix> analytic;
        std::vector<std::function<ComplexMatrix(double)>> curves;
        if (ch.form() == ChannelForm::KrausCurve) {
          analytic = ch.analytic_kraus_derivative(theta, l);
          for (std::size_t k = 0; k < analytic.size(); ++k)
            curves.push_back([&ch, moved, k](double s) { return ch.raw_kraus(moved(s))[k]; });
        } else {
          const SpectralData sd = ch.spectral_at(theta);
          analytic.push_back(sd.dp[static_cast<std::size_t>(l)].cast<Complex>());
          analytic.push_back(sd.dw[static_cast<std::size_t>(l)]);
          curves.push_back([&ch, moved](double s) { return ComplexMatrix(ch.spectral_at(moved(s)).p.cast<Complex>()); });
          curves.push_back([&ch, moved](double s) { return ch.spectral_at(moved(s)).w; });
        }
        for (std::size_t k = 0; k < analytic.size(); ++k) {
          const ComplexMatrix numeric = linalg::differentiate_curve(curves[k], 0.0, cfg);
          const double err = linalg::max_abs(numeric - analytic[k]) / std::max(1.0, linalg::max_abs(analytic[k]));
          if (err > worst) {
            worst = err;
            worst_family = family;
          }
        }
      }
    }
  }
  std::ostringstream d;
  d << "max relative entry error " << worst << " (" << worst_family << ")";
  return {worst < 1e-6, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_red;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-red" && i + 1 < argc) {
      known_red.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--known-red N]...\n");
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Example 1 equality and closed form", criterion1},
      {"quasi-classical dephasing chain", criterion2},
      {"unitary attainability condition", criterion3},
      {"gap identity over random channels", criterion4},
      {"ordering and remixing suite", criterion5},
      {"Kraus vs spectral route", criterion6},
      {"remixing penalty", criterion7},
      {"multi-parameter suite", criterion8},
      {"estimation variance", criterion9},
      {"finite-difference fidelity", criterion10},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(id);
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - failed.size(), criteria.size());
  if (failed != known_red) {
    for (int id : known_red)
      if (!failed.count(id)) std::printf("criterion %d was declared known-red but passes\n", id);
    return 1;
  }
  return 0;
}
