#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "qfi/errors.hpp"
#include "qfi/multi.hpp"
#include "qfi/random_models.hpp"

using namespace qfi;

namespace {

// Example 2 output state built directly from its definition.
ComplexMatrix example2_rho(double f, double g) {
  ComplexVector v1(3);
  v1 << g, std::sqrt(1.0 - g * g), 0.0;
  ComplexMatrix out = f * f * v1 * v1.adjoint();
  out(2, 2) += 1.0 - f * f;
  return out;
}

}  // namespace

TEST_CASE("Example 2: SLD and SM matrices agree with a Sylvester-solve oracle") {
  const ParametricChannel ch = builtin("example2");  // f = theta1, g = theta2
  const double a = 0.6;
  const double b = 0.3;
  const auto msc = bounds::multi_spectral_curve(ch, {a, b});
  const auto h = bounds::sld_matrix(msc);
  const auto c = bounds::sm_matrix(msc);

  const ComplexMatrix rho = example2_rho(a, b);
  const ComplexMatrix d1 = oracle::diff5([&](double s) { return example2_rho(s, b); }, a, 1e-4);
  const ComplexMatrix d2 = oracle::diff5([&](double s) { return example2_rho(a, s); }, b, 1e-4);
  const ComplexMatrix l1 = oracle::sld_operator(rho, d1);
  const ComplexMatrix l2 = oracle::sld_operator(rho, d2);
  RealMatrix want(2, 2);
  want(0, 0) = (rho * l1 * l1).trace().real();
  want(1, 1) = (rho * l2 * l2).trace().real();
  want(0, 1) = want(1, 0) = 0.5 * (rho * (l1 * l2 + l2 * l1)).trace().real();
  CHECK(linalg::max_abs(h.entries - want) < 1e-7);
  CHECK(linalg::max_abs(h.entries - c.entries) < 1e-10);
  // 4 f^2 / (1 - g^2) from |v1'|^2
  CHECK(h.entries(1, 1) == doctest::Approx(4.0 * a * a / (1.0 - b * b)).epsilon(1e-12));
  CHECK(bounds::multi_attainability_check(msc, 1e-9).attainable);
}

TEST_CASE("random two-parameter channels: Loewner order and directional reduction") {
  randomized::Engine rng(77);
  for (int i = 0; i < 8; ++i) {
    const ParametricChannel ch = randomized::random_kraus_channel(2 + i % 2, 2, 2, rng);
    const ParamPoint theta = randomized::random_interior_point(ch, 0.1, rng);
    CAPTURE(i);
    bounds::PovmChoice choice;
    choice.kind = bounds::PovmChoice::Kind::Fixed;
    choice.povm = randomized::random_povm(ch.dim(), 4, rng);
    const auto r = bounds::multi_parameter_report(ch, theta, choice);
    CHECK(r.loewner.all_hold());
    const auto v = randomized::random_direction(2, rng);
    const auto d = bounds::directional_reduction_check(ch, theta, v);
    CHECK(d.passed);
    CHECK(d.max_relative_error < 1e-5);
  }
}

TEST_CASE("rank-deficient information uses the pseudo-inverse") {
  // both parameters enter dephasing2 only through their product
  const auto r = bounds::multi_parameter_report(builtin("dephasing2"), {0.4, 0.6}, {});
  CHECK(r.sld_floor.rank == 1);
  CHECK_FALSE(r.sld_floor.full_rank);
  bool flagged = false;
  for (const auto& w : r.warnings) flagged = flagged || w.find("pseudo") != std::string::npos;
  CHECK(flagged);
}

TEST_CASE("rotation2 at a generic point is a unitary family") {
  const auto r = bounds::multi_parameter_report(builtin("rotation2"), {0.4, -0.3}, {});
  CHECK(r.attainability.unitary);
  CHECK(r.loewner.sld_le_sm.holds);
}

TEST_CASE("Cramer-Rao floor of a full-rank matrix") {
  bounds::InfoMatrix m;
  m.entries = RealMatrix::Identity(2, 2) * 4.0;
  const auto floor = bounds::cramer_rao_floor(m, 100.0);
  CHECK(floor.full_rank);
  CHECK(floor.covariance(0, 0) == doctest::Approx(1.0 / 400.0));
}
