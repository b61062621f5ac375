#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "qfi/bounds.hpp"
#include "qfi/errors.hpp"
#include "qfi/random_models.hpp"

using namespace qfi;

namespace {

POVM plus_minus() {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix u(2, 2);
  u << s, s, s, -s;
  return POVM::from_basis(u);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Fisher information from explicit probabilities and five-point slopes.
double fisher_oracle(const ParametricChannel& ch, const POVM& povm, double t) {
  double total = 0.0;
  for (const auto& m : povm.elements()) {
    auto prob = [&](double s) {
      ComplexMatrix out(1, 1);
      out(0, 0) = (oracle::output_state(ch, s) * m).trace();
      return out;
    };
    const double p = prob(t)(0, 0).real();
    const double dp = oracle::diff5(prob, t)(0, 0).real();
    if (p > 1e-12) total += dp * dp / p;
  }
  return total;
}

}  // namespace

TEST_CASE("dephasing on |+>: Fisher, SLD and SM coincide") {
  const ParametricChannel ch = builtin("dephasing");
  bounds::PovmChoice choice;
  choice.kind = bounds::PovmChoice::Kind::Fixed;
  choice.povm = plus_minus();
  for (double t : {0.1, 0.35, 0.5, 0.8}) {
    CAPTURE(t);
    const double want = 1.0 / (t * (1.0 - t));
    const auto r = bounds::one_parameter_report(ch, {t}, choice);
    CHECK(rel(*r.fisher, want) < 1e-8);
    CHECK(rel(r.sld, want) < 1e-8);
    CHECK(rel(r.sm, want) < 1e-8);
    CHECK(r.attainability.attainable);
    CHECK(r.sld_condition->satisfied);
  }
}

TEST_CASE("degenerate output at theta = 1/2 is resolved by the first-order split") {
  const auto r = bounds::one_parameter_report(builtin("dephasing"), {0.5}, {});
  CHECK(rel(r.sld, 4.0) < 1e-8);
  bool flagged = false;
  for (const auto& w : r.warnings) flagged = flagged || w.find("degenerate") != std::string::npos;
  CHECK(flagged);
}

TEST_CASE("amplitude damping on |+> against the Bloch-vector QFI") {
  const ParametricChannel ch = builtin("amplitude-damping");
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CAPTURE(t);
    const Eigen::Vector3d r = oracle::bloch(oracle::output_state(ch, t));
    const Eigen::Vector3d dr = oracle::bloch(oracle::diff5([&](double s) { return oracle::output_state(ch, s); }, t));
    const auto rep = bounds::one_parameter_report(ch, {t}, {});
    CHECK(rel(rep.sld, oracle::bloch_qfi(r, dr)) < 1e-7);
    CHECK(rep.sld < rep.sm);
    CHECK_FALSE(rep.attainability.attainable);
  }
  // frozen values at the midpoint
  const auto mid = bounds::one_parameter_report(ch, {0.5}, {});
  CHECK(mid.sld == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(mid.sm == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(mid.gap == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("Example 1: both bounds equal 4(1 + t^2)/(1 - t^2)") {
  const ParametricChannel ch = builtin("example1");
  for (double t : {0.2, 0.5, 0.8}) {
    CAPTURE(t);
    // rho(t) built independently from its definition
    auto rho = [](double s) {
      ComplexVector v1(3);
      v1 << s, std::sqrt(1.0 - s * s), 0.0;
      ComplexMatrix out = s * s * v1 * v1.adjoint();
      out(2, 2) += 1.0 - s * s;
      return out;
    };
    const double h = oracle::sld_qfi(rho(t), oracle::diff5(rho, t, 1e-4));
    const auto r = bounds::one_parameter_report(ch, {t}, {});
    CHECK(rel(r.sld, h) < 1e-7);
    CHECK(rel(r.sld, 4.0 * (1.0 + t * t) / (1.0 - t * t)) < 1e-10);
    CHECK(rel(r.sm, r.sld) < 1e-12);
    CHECK(r.attainability.residual < 1e-12);
  }
}

TEST_CASE("random channels: SLD against the Sylvester solve, C against parallel transport") {
  randomized::Engine rng(2024);
  int compared = 0;
  for (int i = 0; i < 40; ++i) {
    const int dim = 2 + i % 3;
    const ParametricChannel ch = randomized::random_kraus_channel(dim, 1 + i % 3, 1, rng);
    const double t = randomized::random_interior_point(ch, 0.1, rng)[0];
    CAPTURE(i);
    bounds::BoundReport r;
    try {
      r = bounds::one_parameter_report(ch, {t}, {});
    } catch (const DegeneracyError&) {
      continue;
    }
    const ComplexMatrix rho = oracle::output_state(ch, t);
    const ComplexMatrix drho = oracle::diff5([&](double s) { return oracle::output_state(ch, s); }, t, 1e-4);
    CHECK(rel(r.sld, oracle::sld_qfi(rho, drho)) < 1e-6);
    const double c = oracle::sm_parallel_transport(ch.raw_kraus({t}), ch.analytic_kraus_derivative({t}, 0),
                                                   ch.input_state().amplitudes());
    CHECK(rel(r.sm, c) < 1e-6);
    CHECK(r.sld <= r.sm + 1e-8);
    CHECK(std::abs(r.gap - (r.sm - r.sld)) < 1e-8 * std::max(1.0, r.sm));
    ++compared;
  }
  CHECK(compared >= 35);
}

TEST_CASE("Fisher information against direct probabilities, and the SLD basis attains H") {
  randomized::Engine rng(99);
  for (int i = 0; i < 10; ++i) {
    const ParametricChannel ch = randomized::random_kraus_channel(2 + i % 2, 2, 1, rng);
    const double t = randomized::random_interior_point(ch, 0.1, rng)[0];
    const POVM povm = randomized::random_povm(ch.dim(), 3, rng);
    const auto f = bounds::fisher_information(ch, povm, t);
    CHECK(rel(f.value, fisher_oracle(ch, povm, t)) < 1e-7);
    const auto sc = bounds::spectral_curve(ch, t);
    const double h = bounds::sld_information(sc);
    CHECK(f.value <= h + 1e-7);
    const POVM best = bounds::optimal_povm_from_sld(bounds::sld_score(sc));
    CHECK(rel(bounds::fisher_information(ch, best, t).value, h) < 1e-5);
  }
}

TEST_CASE("unitary condition value for z rotation on |0>") {
  const auto u = bounds::unitary_attainability(builtin("rotation"), {0.3}, 1e-8);
  CHECK(std::abs(u.value - Complex(0.0, 0.5)) < 1e-10);
  CHECK_FALSE(u.attainable);
}

TEST_CASE("SM condition carries its caveat and fails off the attainable class") {
  bounds::PovmChoice choice;
  choice.kind = bounds::PovmChoice::Kind::SldOptimal;
  const auto r = bounds::one_parameter_report(builtin("amplitude-damping"), {0.4}, choice);
  REQUIRE(r.sm_condition);
  CHECK_FALSE(r.sm_condition->satisfied);
  CHECK_FALSE(r.sm_condition->caveat.empty());
  CHECK(rel(*r.fisher, r.sld) < 1e-6);
}

TEST_CASE("spectral-form reports use the spectral gauge") {
  const auto r = bounds::one_parameter_report(builtin("example1"), {0.4}, {});
  CHECK(r.gauge_source == bounds::GaugeSource::SpectralForm);
  CHECK_FALSE(r.method_cross_check.has_value());
}

TEST_CASE("points outside the domain are rejected") {
  CHECK_THROWS_AS(bounds::one_parameter_report(builtin("dephasing"), {1.2}, {}), ValidationError);
}
