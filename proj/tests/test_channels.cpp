#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "qfi/channels.hpp"
#include "qfi/errors.hpp"
#include "qfi/random_models.hpp"

using namespace qfi;

TEST_CASE("every built-in family satisfies its invariants at the probe points") {
  for (const auto& family : builtin_families()) {
    if (family == "custom-spectral") continue;
    CAPTURE(family);
    const ParametricChannel ch = builtin(family);
    for (const auto& p : ch.domain().probe_points()) CHECK_NOTHROW(ch.check_invariants(p));
  }
}

TEST_CASE("custom-spectral needs its data") {
  CHECK_THROWS_AS(builtin("custom-spectral"), ValidationError);
  CHECK_THROWS_AS(builtin("no-such-family"), ValidationError);
}

TEST_CASE("domain membership") {
  const Domain d{{0.0, -1.0}, {1.0, 1.0}};
  CHECK(d.contains({0.5, 0.0}));
  CHECK_FALSE(d.contains({1.5, 0.0}));
  CHECK_FALSE(d.contains({0.5}));
  CHECK_FALSE(d.contains({std::nan(""), 0.0}));
  CHECK(d.probe_points().size() == 5);
}

TEST_CASE("finite-difference Kraus derivative matches the analytic one") {
  const ParametricChannel ch = builtin("amplitude-damping");
  const ParamPoint theta{0.37};
  const auto analytic = ch.analytic_kraus_derivative(theta, 0);
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const ComplexMatrix numeric = oracle::diff5([&](double t) { return ch.raw_kraus({t})[k]; }, 0.37, 1e-3);
    CHECK(linalg::max_abs(numeric - analytic[k]) < 1e-9);
  }
}

TEST_CASE("remixing leaves the channel output unchanged") {
  randomized::Engine rng(11);
  const ParametricChannel base = builtin("depolarizing");
  const ParametricChannel mixed = randomized::random_remixing(base, true, rng);
  for (double t : {0.1, 0.5, 0.9}) {
    CHECK(linalg::max_abs(base.output_matrix({t}) - mixed.output_matrix({t})) < 1e-12);
    CHECK_NOTHROW(mixed.kraus_at({t}));
  }
}

TEST_CASE("slices of a two-parameter channel") {
  const ParametricChannel ch = builtin("damped-rotation");
  const ParamPoint origin{0.3, 0.2};
  const std::vector<double> v{0.6, -0.8};
  const ParametricChannel line = ch.slice(origin, v);
  CHECK(line.param_count() == 1);
  const double t = 0.05;
  const ParamPoint moved{origin[0] + t * v[0], origin[1] + t * v[1]};
  CHECK(linalg::max_abs(line.output_matrix({t}) - ch.output_matrix(moved)) < 1e-14);
}

TEST_CASE("random Kraus channels are complete on their domain") {
  randomized::Engine rng(5);
  for (int i = 0; i < 10; ++i) {
    const ParametricChannel ch = randomized::random_kraus_channel(2 + i % 3, 1 + i % 3, 1 + i % 2, rng);
    for (const auto& p : ch.domain().probe_points()) CHECK_NOTHROW(ch.check_invariants(p));
  }
}

TEST_CASE("input states must match the channel dimension") {
  CHECK_THROWS_AS(builtin("dephasing").with_input(PureState::basis(3, 0)), ValidationError);
}
