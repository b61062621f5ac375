#include <cmath>
#include <random>

#include "doctest.h"
#include "qfi/errors.hpp"
#include "qfi/linalg.hpp"
#include "qfi/quantum.hpp"

using namespace qfi;

namespace {

ComplexMatrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  ComplexMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("eigendecomposition reconstructs and sorts ascending") {
  std::mt19937_64 rng(7);
  for (int d = 1; d <= 5; ++d) {
    const ComplexMatrix a = random_hermitian(d, rng);
    const auto es = linalg::hermitian_eigendecompose(a);
    const ComplexMatrix back = es.vectors * es.values.cast<Complex>().asDiagonal() * es.vectors.adjoint();
    CHECK(linalg::max_abs(back - a) < 1e-12);
    CHECK(linalg::max_abs(es.vectors.adjoint() * es.vectors - ComplexMatrix::Identity(d, d)) < 1e-12);
    for (int i = 1; i < d; ++i) CHECK(es.values(i - 1) <= es.values(i));
  }
}

TEST_CASE("degenerate eigenvectors are a deterministic function of the input") {
  const ComplexMatrix a = ComplexMatrix::Identity(3, 3);
  const auto first = linalg::hermitian_eigendecompose(a);
  const auto second = linalg::hermitian_eigendecompose(a);
  CHECK(linalg::max_abs(first.vectors - second.vectors) == 0.0);
}

TEST_CASE("non-Hermitian input is rejected") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(linalg::hermitian_eigendecompose(a), ValidationError);
}

TEST_CASE("psd square root") {
  std::mt19937_64 rng(3);
  const ComplexMatrix h = random_hermitian(4, rng);
  const ComplexMatrix psd = h * h.adjoint();
  const ComplexMatrix s = linalg::psd_sqrt(psd);
  CHECK(linalg::max_abs(s * s - psd) < 1e-10);
  CHECK_THROWS_AS(linalg::psd_sqrt(-ComplexMatrix::Identity(2, 2)), ValidationError);
}

TEST_CASE("unitary exponential of a Pauli matrix") {
  const double t = 0.37;
  const ComplexMatrix u = linalg::unitary_exp(pauli_z(), t);
  CHECK(std::abs(u(0, 0) - std::exp(Complex(0.0, -t))) < 1e-14);
  CHECK(std::abs(u(1, 1) - std::exp(Complex(0.0, t))) < 1e-14);
  CHECK(std::abs(u(0, 1)) < 1e-15);
}

TEST_CASE("Loewner order") {
  RealMatrix a = RealMatrix::Identity(2, 2);
  RealMatrix b = 2.0 * RealMatrix::Identity(2, 2);
  CHECK(linalg::loewner_leq(a, b, 0.0).holds);
  CHECK_FALSE(linalg::loewner_leq(b, a, 0.0).holds);
  CHECK(linalg::loewner_leq(b, a, 0.0).min_eigenvalue == doctest::Approx(-1.0));
  RealMatrix c(2, 2);
  c << 1.0, 1.0, 1.0, 1.0;
  // c has eigenvalues 0 and 2, so I - c is indefinite
  CHECK(linalg::loewner_leq(c, RealMatrix(c + a), 1e-12).holds);
  CHECK_FALSE(linalg::loewner_leq(c, a, 1e-12).holds);
}

TEST_CASE("pseudo-inverse reports rank") {
  RealMatrix a(2, 2);
  a << 1.0, 1.0, 1.0, 1.0;
  const auto p = linalg::symmetric_pinv(a);
  CHECK(p.rank == 1);
  CHECK(linalg::max_abs(a * p.matrix * a - a) < 1e-12);
}

TEST_CASE("finite differences of a matrix curve") {
  auto curve = [](double x) {
    ComplexMatrix m(1, 2);
    m << std::sin(x), Complex(0.0, std::exp(x));
    return m;
  };
  const double x = 0.4;
  for (auto scheme : {linalg::DiffScheme::Central2, linalg::DiffScheme::Central4}) {
    linalg::DiffConfig cfg;
    cfg.scheme = scheme;
    const ComplexMatrix d = linalg::differentiate_curve(curve, x, cfg);
    const double tol = scheme == linalg::DiffScheme::Central2 ? 1e-8 : 1e-11;
    CHECK(std::abs(d(0, 0) - std::cos(x)) < tol);
    CHECK(std::abs(d(0, 1) - Complex(0.0, std::exp(x))) < tol);
  }
  linalg::DiffConfig coarse;
  coarse.step = 1e-2;
  coarse.scheme = linalg::DiffScheme::Central2;
  linalg::DiffConfig extrapolated = coarse;
  extrapolated.richardson = true;
  const double plain = std::abs(linalg::differentiate_curve(curve, x, coarse)(0, 0) - std::cos(x));
  const double rich = std::abs(linalg::differentiate_curve(curve, x, extrapolated)(0, 0) - std::cos(x));
  CHECK(rich < plain / 100.0);
}
