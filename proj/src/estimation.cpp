#include "qfi/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "qfi/errors.hpp"

namespace qfi::estimation {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr int kGridPoints = 129;
constexpr double kGoldenTol = 1e-8;
constexpr double kInfoFloor = 1e-12;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double log_likelihood(const ParametricChannel& ch, const POVM& povm, const std::vector<long>& counts, double theta) {
  const ComplexMatrix rho = ch.output_matrix(ParamPoint{theta});
  double total = 0.0;
  for (std::size_t m = 0; m < povm.size(); ++m) {
    if (counts[m] == 0) continue;
    const double p = (rho * povm[m]).trace().real();
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    total += static_cast<double>(counts[m]) * std::log(p);
  }
  return total;
}

struct Candidate {
  double theta;
  double value;
};

Candidate golden_section(const ParametricChannel& ch, const POVM& povm, const std::vector<long>& counts, double a,
                         double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = log_likelihood(ch, povm, counts, c);
  double fd = log_likelihood(ch, povm, counts, d);
  while (b - a > kGoldenTol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = log_likelihood(ch, povm, counts, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = log_likelihood(ch, povm, counts, d);
    }
  }
  const double mid = 0.5 * (a + b);
  return {mid, log_likelihood(ch, povm, counts, mid)};
}

void require_one_parameter(const ParametricChannel& ch, const char* what) {
  if (ch.param_count() != 1) throw ValidationError(std::string(what) + " needs a one-parameter channel");
}

struct Information {
  double sld = 0.0;
  double sm = 0.0;
};

Information information_at(const ParametricChannel& ch, double theta, const linalg::DiffConfig& cfg) {
  Information out;
  if (ch.form() == ChannelForm::KrausCurve) {
    const bounds::CanonicalKraus canon = bounds::canonical_kraus(ch, theta, cfg);
    const bounds::SpectralCurve sc = bounds::curve_from_canonical(canon, ch.input_state(), ParamPoint{theta});
    sc.validate();
    out.sld = bounds::sld_information(sc);
    out.sm = bounds::sm_bound_kraus(canon.ops, canon.derivative, DensityMatrix(ch.input_state()));
  } else {
    const bounds::SpectralCurve sc = bounds::spectral_curve(ch, theta, cfg);
    out.sld = bounds::sld_information(sc);
    out.sm = bounds::sm_bound_spectral(sc);
  }
  return out;
}

Interval domain_interval(const ParametricChannel& ch) { return {ch.domain().lo[0], ch.domain().hi[0]}; }

// Runs body(r) for every replication; the lowest-index failure is rethrown.
template <typename Body>
void for_replications(int count, Execution execution, Body body) {
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(count));
  const bool parallel = execution == Execution::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int r = 0; r < count; ++r) {
    try {
      body(r);
    } catch (...) {
      failures[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
}

void summarize(EstimationRun& run, const std::vector<MleResult>& results) {
  run.estimates.clear();
  run.boundary_hits = 0;
  for (const auto& r : results) {
    run.estimates.push_back(r.theta);
    if (r.at_boundary) ++run.boundary_hits;
  }
  const double n = static_cast<double>(run.estimates.size());
  run.mean = std::accumulate(run.estimates.begin(), run.estimates.end(), 0.0) / n;
  run.bias = run.mean - run.theta_true;
  double ss = 0.0;
  for (double x : run.estimates) ss += (x - run.mean) * (x - run.mean);
  run.variance = run.estimates.size() > 1 ? ss / (n - 1.0) : 0.0;
  if (run.boundary_hits > 0) {
    std::ostringstream msg;
    msg << run.boundary_hits << " estimate(s) on the search boundary";
    run.warnings.push_back(msg.str());
  }
}

void attach_bounds(EstimationRun& run) {
  const double n = static_cast<double>(run.effective_shots);
  if (run.fisher) {
    if (*run.fisher > kInfoFloor) {
      run.bound_fisher = 1.0 / (n * *run.fisher);
      run.ratio_fisher = run.variance / *run.bound_fisher;
    } else {
      run.warnings.push_back("Fisher information is zero at theta_true: the POVM is uninformative, no variance ratio");
    }
  }
  if (run.sld > kInfoFloor) {
    run.bound_sld = 1.0 / (n * run.sld);
    run.ratio_sld = run.variance / *run.bound_sld;
  }
  if (run.sm > kInfoFloor) {
    run.bound_sm = 1.0 / (n * run.sm);
    run.ratio_sm = run.variance / *run.bound_sm;
  }
}

}  // namespace

// --- RNG and sampling -------------------------------------------------------

CounterRng::CounterRng(std::uint64_t seed) : key_(mix64(seed)) {}

std::uint64_t CounterRng::next() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::vector<long> sample_outcomes(const DensityMatrix& rho, const POVM& povm, long shots, std::uint64_t seed) {
  if (shots < 0) throw ValidationError("shot count must be non-negative");
  const std::vector<double> p = measurement_distribution(rho, povm);
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  cdf.back() = 1.0;
  std::vector<long> counts(p.size(), 0);
  CounterRng rng(seed);
  for (long s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ++counts[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1))];
  }
  return counts;
}

// --- MLE --------------------------------------------------------------------

MleResult mle_estimate(const ParametricChannel& ch, const POVM& povm, const std::vector<long>& counts,
                       const Interval& search) {
  require_one_parameter(ch, "mle_estimate");
  if (counts.size() != povm.size()) throw ValidationError("mle_estimate: one count per POVM element required");
  if (!(search.lo < search.hi)) throw ValidationError("mle_estimate: empty search interval");
  if (std::all_of(counts.begin(), counts.end(), [](long c) { return c == 0; }))
    throw ValidationError("mle_estimate: no counts");

  std::vector<double> grid(kGridPoints);
  std::vector<double> values(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    grid[static_cast<std::size_t>(i)] = search.lo + (search.hi - search.lo) * i / (kGridPoints - 1);
    values[static_cast<std::size_t>(i)] = log_likelihood(ch, povm, counts, grid[static_cast<std::size_t>(i)]);
  }
  if (std::none_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }))
    throw NumericError("likelihood is -inf on the whole search interval (impossible counts)");

  std::vector<Candidate> candidates;
  for (int i = 0; i < kGridPoints; ++i) {
    const auto si = static_cast<std::size_t>(i);
    if (!std::isfinite(values[si])) continue;
    const bool left_ok = i == 0 || values[si] >= values[si - 1];
    const bool right_ok = i == kGridPoints - 1 || values[si] >= values[si + 1];
    if (!(left_ok && right_ok)) continue;
    candidates.push_back({grid[si], values[si]});
    const double a = grid[static_cast<std::size_t>(std::max(0, i - 1))];
    const double b = grid[static_cast<std::size_t>(std::min(kGridPoints - 1, i + 1))];
    const Candidate refined = golden_section(ch, povm, counts, a, b);
    if (std::isfinite(refined.value)) candidates.push_back(refined);
  }

  const double centre = 0.5 * (search.lo + search.hi);
  Candidate best = candidates.front();
  for (const auto& c : candidates) {
    const double tie = 1e-9 * std::max(1.0, std::abs(best.value));
    if (c.value > best.value + tie) {
      best = c;
    } else if (std::abs(c.value - best.value) <= tie) {
      const double dc = std::abs(c.theta - centre);
      const double db = std::abs(best.theta - centre);
      if (dc < db || (dc == db && c.theta < best.theta)) best = c;
    }
  }
  const double edge = 1e-6 * (search.hi - search.lo);
  return {best.theta, best.value, best.theta - search.lo < edge || search.hi - best.theta < edge};
}

// --- experiments ------------------------------------------------------------

EstimationRun cr_experiment(const ParametricChannel& ch, double theta_true, const POVM& povm,
                            const std::string& povm_label, const ExperimentConfig& cfg) {
  require_one_parameter(ch, "cr_experiment");
  if (!ch.domain().contains(ParamPoint{theta_true})) throw ValidationError("theta_true outside the channel domain");
  if (cfg.shots < 1 || cfg.replications < 1) throw ValidationError("shots and replications must be positive");
  const Interval search = cfg.search.value_or(domain_interval(ch));
  const DensityMatrix rho(ch.output_matrix(ParamPoint{theta_true}));

  EstimationRun run;
  run.channel = ch.name();
  run.theta_true = theta_true;
  run.povm_label = povm_label;
  run.shots = cfg.shots;
  run.effective_shots = cfg.shots;
  run.replications = cfg.replications;
  run.seed = cfg.seed;

  std::vector<MleResult> results(static_cast<std::size_t>(cfg.replications));
  std::vector<long> first;
  for_replications(cfg.replications, cfg.execution, [&](int r) {
    const auto counts = sample_outcomes(rho, povm, cfg.shots, stream_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    results[static_cast<std::size_t>(r)] = mle_estimate(ch, povm, counts, search);
    if (r == 0) first = counts;
  });
  run.first_counts = first;
  summarize(run, results);

  const bounds::FisherResult f = bounds::fisher_information(ch, povm, theta_true, cfg.diff);
  run.fisher = f.value;
  if (f.singular) run.warnings.push_back("Fisher information singular at theta_true");
  const Information info = information_at(ch, theta_true, cfg.diff);
  run.sld = info.sld;
  run.sm = info.sm;
  attach_bounds(run);
  return run;
}

EstimationRun adaptive_two_stage(const ParametricChannel& ch, double theta_true, const AdaptiveConfig& adaptive,
                                 const ExperimentConfig& cfg) {
  require_one_parameter(ch, "adaptive_two_stage");
  if (!ch.domain().contains(ParamPoint{theta_true})) throw ValidationError("theta_true outside the channel domain");
  if (cfg.replications < 1) throw ValidationError("replications must be positive");
  if (!(adaptive.n_pilot > 0 && adaptive.n_pilot < cfg.shots))
    throw ValidationError("n_pilot must satisfy 0 < n_pilot < N");
  const Interval search = cfg.search.value_or(domain_interval(ch));
  const POVM pilot = adaptive.pilot_povm.value_or(POVM::computational(ch.dim()));
  const DensityMatrix rho(ch.output_matrix(ParamPoint{theta_true}));
  const double reach = linalg::make_stencil(cfg.diff).reach();
  const Interval usable{ch.domain().lo[0] + reach, ch.domain().hi[0] - reach};

  EstimationRun run;
  run.channel = ch.name();
  run.theta_true = theta_true;
  run.povm_label = "adaptive-sld";
  run.shots = cfg.shots;
  run.effective_shots = cfg.shots - adaptive.n_pilot;
  run.replications = cfg.replications;
  run.seed = cfg.seed;
  AdaptiveRecord record;
  record.n_pilot = adaptive.n_pilot;
  record.pilot_povm_label = adaptive.pilot_povm ? "custom" : "computational";
  record.pilot_povm = pilot.elements();
  record.pilot_estimates.resize(static_cast<std::size_t>(cfg.replications));

  std::vector<MleResult> results(static_cast<std::size_t>(cfg.replications));
  std::vector<long> first;
  std::vector<ComplexMatrix> first_povm;
  for_replications(cfg.replications, cfg.execution, [&](int r) {
    const std::uint64_t seed_r = stream_seed(cfg.seed, static_cast<std::uint64_t>(r));
    const auto pilot_counts = sample_outcomes(rho, pilot, adaptive.n_pilot, seed_r);
    const double theta0 = mle_estimate(ch, pilot, pilot_counts, search).theta;
    record.pilot_estimates[static_cast<std::size_t>(r)] = theta0;
    // the SLD needs the stencil inside the domain
    const double anchor = std::clamp(theta0, usable.lo, usable.hi);
    const POVM stage2 = bounds::optimal_povm_from_sld(bounds::sld_score(bounds::spectral_curve(ch, anchor, cfg.diff)));
    const auto counts = sample_outcomes(rho, stage2, cfg.shots - adaptive.n_pilot, seed_r ^ kGolden);
    Interval window = search;
    if (adaptive.window) {
      window.lo = std::max(search.lo, theta0 - *adaptive.window);
      window.hi = std::min(search.hi, theta0 + *adaptive.window);
    }
    results[static_cast<std::size_t>(r)] = mle_estimate(ch, stage2, counts, window);
    if (r == 0) {
      first = counts;
      first_povm = stage2.elements();
    }
  });
  run.first_counts = first;
  record.first_stage2_povm = first_povm;
  run.adaptive = std::move(record);
  summarize(run, results);

  const Information info = information_at(ch, theta_true, cfg.diff);
  run.sld = info.sld;
  run.sm = info.sm;
  attach_bounds(run);
  return run;
}

// --- input-state search -----------------------------------------------------

PureState state_from_angles(int dim, const std::vector<double>& angles) {
  if (static_cast<int>(angles.size()) != 2 * dim - 2) throw ValidationError("state_from_angles: need 2d - 2 angles");
  ComplexVector v(dim);
  double carry = 1.0;
  for (int k = 0; k < dim; ++k) {
    double mag = carry;
    if (k < dim - 1) {
      mag *= std::cos(angles[static_cast<std::size_t>(k)]);
      carry *= std::sin(angles[static_cast<std::size_t>(k)]);
    }
    const double phase = k == 0 ? 0.0 : angles[static_cast<std::size_t>(dim - 1 + k - 1)];
    v[k] = std::polar(mag, phase);
  }
  return PureState::normalized(v);
}

double input_objective(const ParametricChannel& ch, const PureState& input, double theta, Objective objective,
                       const linalg::DiffConfig& cfg) {
  const ParametricChannel probe = ch.with_input(input);
  const Information info = information_at(probe, theta, cfg);
  return objective == Objective::Sld ? info.sld : info.sm;
}

namespace {

struct SearchContext {
  const ParametricChannel* ch;
  double theta;
  Objective objective;
  linalg::DiffConfig cfg;
  int dim;
  int evaluations = 0;
  int rejected = 0;
};

constexpr double kRejectedPenalty = 1e10;

double negated_objective(const gsl_vector* x, void* params) {
  auto* ctx = static_cast<SearchContext*>(params);
  std::vector<double> angles(x->size);
  for (std::size_t i = 0; i < x->size; ++i) angles[i] = gsl_vector_get(x, i);
  ++ctx->evaluations;
  try {
    return -input_objective(*ctx->ch, state_from_angles(ctx->dim, angles), ctx->theta, ctx->objective, ctx->cfg);
  } catch (const Error&) {
    ++ctx->rejected;
    return kRejectedPenalty;
  }
}

}  // namespace

InputOptimum optimize_input_state(const ParametricChannel& ch, double theta, Objective objective, int restarts,
                                  std::uint64_t seed, const linalg::DiffConfig& cfg) {
  require_one_parameter(ch, "optimize_input_state");
  if (ch.form() != ChannelForm::KrausCurve) throw ValidationError("input-state search needs a Kraus curve");
  if (restarts < 1) throw ValidationError("restarts must be positive");
  const int dim = ch.dim();
  SearchContext ctx{&ch, theta, objective, cfg, dim};
  if (dim == 1) {
    const PureState only = PureState::basis(1, 0);
    return {only, input_objective(ch, only, theta, objective, cfg), 1, 0};
  }

  const auto n = static_cast<std::size_t>(2 * dim - 2);
  gsl_set_error_handler_off();
  gsl_multimin_function fn{&negated_objective, n, &ctx};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  gsl_vector_set_all(step, 0.4);
  gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);

  CounterRng rng(seed);
  std::vector<double> best_angles;
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < restarts; ++start) {
    for (std::size_t i = 0; i < n; ++i) {
      const double span = i < static_cast<std::size_t>(dim - 1) ? 0.5 * M_PI : 2.0 * M_PI;
      gsl_vector_set(x, i, span * rng.uniform());
    }
    gsl_multimin_fminimizer_set(solver, &fn, x, step);
    for (int iter = 0; iter < 800; ++iter) {
      if (gsl_multimin_fminimizer_iterate(solver) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-7) == GSL_SUCCESS) break;
    }
    if (solver->fval < best) {
      best = solver->fval;
      best_angles.assign(solver->x->data, solver->x->data + n);
    }
  }
  gsl_multimin_fminimizer_free(solver);
  gsl_vector_free(step);
  gsl_vector_free(x);

  if (best >= kRejectedPenalty) throw NumericError("input-state search: every candidate was rejected");
  const PureState state = state_from_angles(dim, best_angles);
  return {state, input_objective(ch, state, theta, objective, cfg), ctx.evaluations, ctx.rejected};
}

}  // namespace qfi::estimation
