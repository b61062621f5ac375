#include <cmath>
#include <numeric>

#include "doctest.h"
#include "qfi/errors.hpp"
#include "qfi/estimation.hpp"

using namespace qfi;
using namespace qfi::estimation;

namespace {

POVM plus_minus() {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix u(2, 2);
  u << s, s, s, -s;
  return POVM::from_basis(u);
}

}  // namespace

TEST_CASE("counter RNG is deterministic and uniform") {
  CounterRng a(42);
  CounterRng b(42);
  CounterRng c(43);
  bool same = true;
  bool differs = false;
  bool in_range = true;
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform();
    same = same && x == b.uniform();
    differs = differs || x != c.uniform();
    in_range = in_range && x >= 0.0 && x < 1.0;
    sum += x;
  }
  CHECK(same);
  CHECK(differs);
  CHECK(in_range);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("sampled counts follow the Born rule") {
  const ParametricChannel ch = builtin("dephasing");
  const DensityMatrix rho(ch.output_matrix({0.2}));
  const long shots = 100000;
  const auto counts = sample_outcomes(rho, plus_minus(), shots, 9);
  CHECK(std::accumulate(counts.begin(), counts.end(), 0L) == shots);
  // p(+) = 1 - theta; five standard deviations
  const double sd = std::sqrt(shots * 0.8 * 0.2);
  CHECK(std::abs(counts[0] - 0.8 * shots) < 5.0 * sd);
}

TEST_CASE("MLE recovers theta from noiseless counts") {
  const ParametricChannel ch = builtin("amplitude-damping");
  const POVM comp = POVM::computational(2);
  const double theta = 0.37;
  // p(0) = (1 + theta) / 2 for amplitude damping on |+>
  const long n = 1000000;
  const long c0 = std::lround(n * 0.5 * (1.0 + theta));
  const auto r = mle_estimate(ch, comp, {c0, n - c0}, {0.0, 1.0});
  CHECK(r.theta == doctest::Approx(theta).epsilon(1e-5));
  CHECK_FALSE(r.at_boundary);
}

TEST_CASE("serial and parallel experiments are bit-identical") {
  const ParametricChannel ch = builtin("dephasing");
  ExperimentConfig cfg;
  cfg.shots = 2000;
  cfg.replications = 40;
  cfg.seed = 5;
  cfg.execution = Execution::Serial;
  const auto serial = cr_experiment(ch, 0.3, plus_minus(), "pm", cfg);
  cfg.execution = Execution::Parallel;
  const auto parallel = cr_experiment(ch, 0.3, plus_minus(), "pm", cfg);
  CHECK(serial.estimates == parallel.estimates);
  CHECK(serial.first_counts == parallel.first_counts);
  CHECK(serial.variance == parallel.variance);
  cfg.seed = 6;
  CHECK(cr_experiment(ch, 0.3, plus_minus(), "pm", cfg).estimates != serial.estimates);
}

TEST_CASE("experiment summary statistics") {
  const ParametricChannel ch = builtin("dephasing");
  ExperimentConfig cfg;
  cfg.shots = 5000;
  cfg.replications = 100;
  const auto run = cr_experiment(ch, 0.4, plus_minus(), "pm", cfg);
  double mean = 0.0;
  for (double e : run.estimates) mean += e;
  mean /= static_cast<double>(run.estimates.size());
  double var = 0.0;
  for (double e : run.estimates) var += (e - mean) * (e - mean);
  var /= static_cast<double>(run.estimates.size() - 1);
  CHECK(run.mean == doctest::Approx(mean));
  CHECK(run.variance == doctest::Approx(var));
  CHECK(*run.bound_sld == doctest::Approx(0.4 * 0.6 / 5000.0).epsilon(1e-6));
  CHECK(*run.ratio_sld > 0.7);
  CHECK(*run.ratio_sld < 1.3);
}

TEST_CASE("adaptive scheme records both stages") {
  const ParametricChannel ch = builtin("amplitude-damping");
  ExperimentConfig cfg;
  cfg.shots = 4000;
  cfg.replications = 30;
  AdaptiveConfig acfg;
  acfg.n_pilot = 400;
  const auto run = adaptive_two_stage(ch, 0.3, acfg, cfg);
  REQUIRE(run.adaptive);
  CHECK(run.effective_shots == 3600);
  CHECK(run.adaptive->pilot_estimates.size() == 30);
  CHECK(run.adaptive->pilot_povm.size() == 2);
  CHECK(run.adaptive->first_stage2_povm.size() == 2);
  CHECK_FALSE(run.fisher.has_value());
  acfg.n_pilot = 5000;
  CHECK_THROWS_AS(adaptive_two_stage(ch, 0.3, acfg, cfg), ValidationError);
}

TEST_CASE("angle parameterization gives unit vectors") {
  const PureState s = state_from_angles(3, {0.3, 1.1, 0.5, -2.0});
  CHECK(s.amplitudes().norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(state_from_angles(3, {0.3}), ValidationError);
}

TEST_CASE("input search finds the excited state for amplitude damping") {
  const ParametricChannel ch = builtin("amplitude-damping");
  const double theta = 0.3;
  const auto best = optimize_input_state(ch, theta, Objective::Sld, 4, 1);
  // |1> gives a classical two-outcome model with information 1/(theta(1-theta))
  CHECK(best.value == doctest::Approx(1.0 / (theta * (1.0 - theta))).epsilon(1e-6));
  CHECK(std::norm(best.state.amplitudes()(1)) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(best.value >= input_objective(ch, ch.input_state(), theta, Objective::Sld) - 1e-9);
}
