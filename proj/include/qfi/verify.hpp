#pragma once

// Randomized property suites: gap identity, ordering chain, route
// cross-check and multi-parameter directional consistency.

#include <cstdint>
#include <string>
#include <vector>

#include "qfi/estimation.hpp"
#include "qfi/random_models.hpp"

namespace qfi::verify {

enum class Suite { Gap, Ordering, Routes, Directional, All };

/// Parses "gap", "ordering", "routes", "directional" or "all".
Suite parse_suite(const std::string& name);
const char* to_string(Suite s);

struct SuiteConfig {
  int channels = 200;
  int multi_channels = 50;
  int directions = 20;
  int povms_per_channel = 3;
  int max_dim = 4;
  int max_env = 3;
  std::uint64_t seed = 42;
  estimation::Execution execution = estimation::Execution::Parallel;
  linalg::DiffConfig diff;
};

struct Failure {
  std::string check;
  std::string channel;
  std::vector<double> theta;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct SuiteResult {
  std::string name;
  int cases = 0;
  int checks = 0;
  int skipped = 0;
  /// Largest value of each check's normalized residual (residual / limit).
  double worst_ratio = 0.0;
  std::vector<Failure> failures;
  std::vector<std::string> notes;

  bool passed() const { return failures.empty(); }
};

/// Engine for case `index` of a suite; independent of execution order.
randomized::Engine case_engine(std::uint64_t seed, std::uint64_t index);

/// Random one-parameter channel for case `index` (dim 2..max_dim, env 1..max_env).
ParametricChannel suite_channel(const SuiteConfig& cfg, int index, randomized::Engine& rng, std::string& label);

SuiteResult run_gap_suite(const SuiteConfig& cfg);
SuiteResult run_ordering_suite(const SuiteConfig& cfg);
SuiteResult run_routes_suite(const SuiteConfig& cfg);
SuiteResult run_directional_suite(const SuiteConfig& cfg);

std::vector<SuiteResult> run_suites(Suite suite, const SuiteConfig& cfg);

}  // namespace qfi::verify
