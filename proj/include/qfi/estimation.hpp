#pragma once

// Outcome sampling, maximum-likelihood estimation, Monte-Carlo Cramer-Rao
// experiments, the two-stage adaptive scheme and input-state search.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfi/bounds.hpp"

namespace qfi::estimation {

/// splitmix64 in counter mode: output i is mix(key + (i + 1) * golden).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Seed of replication r.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t r) { return seed ^ r; }

/// Multinomial counts of `shots` measurements of `povm` on `rho`, drawn by
/// inverse-CDF sampling one shot at a time.
std::vector<long> sample_outcomes(const DensityMatrix& rho, const POVM& povm, long shots, std::uint64_t seed);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct MleResult {
  double theta = 0.0;
  double log_likelihood = 0.0;
  bool at_boundary = false;
};

/// Maximizer of sum_m counts_m log p_m(theta) over `search`: 129-point grid,
/// golden-section refinement of every grid local maximum to 1e-8, ties
/// broken toward the interval centre. One-parameter channels only.
MleResult mle_estimate(const ParametricChannel& ch, const POVM& povm, const std::vector<long>& counts,
                       const Interval& search);

enum class Execution { Serial, Parallel };

struct ExperimentConfig {
  long shots = 10000;
  int replications = 200;
  std::uint64_t seed = 42;
  Execution execution = Execution::Parallel;
  /// MLE search interval; defaults to the channel domain.
  std::optional<Interval> search;
  linalg::DiffConfig diff;
};

struct AdaptiveConfig {
  long n_pilot = 500;
  /// Defaults to the computational basis.
  std::optional<POVM> pilot_povm;
  /// Stage-2 MLE is restricted to theta0 +- window when set.
  std::optional<double> window;
};

struct AdaptiveRecord {
  long n_pilot = 0;
  std::vector<double> pilot_estimates;
  std::vector<ComplexMatrix> pilot_povm;
  /// Stage-2 POVM of the first replication.
  std::vector<ComplexMatrix> first_stage2_povm;
  std::string pilot_povm_label;
};

struct EstimationRun {
  std::string channel;
  double theta_true = 0.0;
  std::string povm_label;
  long shots = 0;
  int replications = 0;
  std::uint64_t seed = 0;
  std::vector<long> first_counts;
  std::vector<double> estimates;
  double mean = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  int boundary_hits = 0;
  /// Information values at theta_true; fisher is absent for adaptive runs.
  std::optional<double> fisher;
  double sld = 0.0;
  double sm = 0.0;
  /// Effective shot count used for the bounds (N, or N - n_pilot).
  long effective_shots = 0;
  std::optional<double> bound_fisher;
  std::optional<double> bound_sld;
  std::optional<double> bound_sm;
  std::optional<double> ratio_fisher;
  std::optional<double> ratio_sld;
  std::optional<double> ratio_sm;
  std::optional<AdaptiveRecord> adaptive;
  std::vector<std::string> warnings;
};

/// Replicated MLE with a fixed POVM. Serial and parallel execution give
/// bit-identical results.
EstimationRun cr_experiment(const ParametricChannel& ch, double theta_true, const POVM& povm,
                            const std::string& povm_label, const ExperimentConfig& cfg);

/// Stage 1: n_pilot shots with the pilot POVM and a rough MLE theta0.
/// Stage 2: the SLD eigenbasis at theta0 for the remaining shots, MLE on
/// stage-2 data only.
EstimationRun adaptive_two_stage(const ParametricChannel& ch, double theta_true, const AdaptiveConfig& adaptive,
                                 const ExperimentConfig& cfg);

enum class Objective { Sld, Sm };

struct InputOptimum {
  PureState state;
  double value = 0.0;
  int evaluations = 0;
  int rejected = 0;
};

/// Pure state from 2d - 2 angles: d - 1 hyperspherical magnitudes followed
/// by d - 1 relative phases.
PureState state_from_angles(int dim, const std::vector<double>& angles);

/// Objective value for one input; throws on degeneracy.
double input_objective(const ParametricChannel& ch, const PureState& input, double theta, Objective objective,
                       const linalg::DiffConfig& cfg = {});

/// Nelder-Mead over the angle parameterization from `restarts` seeded
/// starting points. Inputs whose evaluation fails are rejected.
InputOptimum optimize_input_state(const ParametricChannel& ch, double theta, Objective objective, int restarts,
                                  std::uint64_t seed, const linalg::DiffConfig& cfg = {});

}  // namespace qfi::estimation
