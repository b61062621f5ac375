#include <cmath>

#include "doctest.h"
#include "qfi/errors.hpp"
#include "qfi/quantum.hpp"

using namespace qfi;

TEST_CASE("pure states must be normalized") {
  ComplexVector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(PureState{v}, ValidationError);
  const PureState s = PureState::normalized(v);
  CHECK(s.amplitudes().norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(PureState::normalized(ComplexVector::Zero(2)), ValidationError);
}

TEST_CASE("density matrices are validated") {
  ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
  rho(0, 0) = 0.5;
  CHECK_THROWS_AS(DensityMatrix{rho}, ValidationError);  // trace 0.5
  rho(1, 1) = 0.5;
  const DensityMatrix ok(rho);
  CHECK(ok.purity() == doctest::Approx(0.5));
  CHECK_FALSE(ok.is_pure());
  rho(0, 0) = 1.5;
  rho(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{rho}, ValidationError);  // negative eigenvalue
}

TEST_CASE("Kraus sets must be complete") {
  const ComplexMatrix half = std::sqrt(0.5) * ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(KrausSet({half}), ValidationError);
  CHECK_NOTHROW(KrausSet({half, half}));
}

TEST_CASE("POVMs must sum to the identity") {
  ComplexMatrix m0 = ComplexMatrix::Zero(2, 2);
  m0(0, 0) = 1.0;
  CHECK_THROWS_AS(POVM({m0}), ValidationError);
  const POVM comp = POVM::computational(3);
  CHECK(comp.size() == 3);
}

TEST_CASE("amplitude damping of the excited state") {
  const double g = 0.3;
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix e1 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - g);
  e1(0, 1) = std::sqrt(g);
  const DensityMatrix out = apply_channel(KrausSet({e0, e1}), DensityMatrix(PureState::basis(2, 1)));
  CHECK(out.matrix()(0, 0).real() == doctest::Approx(g));
  CHECK(out.matrix()(1, 1).real() == doctest::Approx(1.0 - g));
  const auto p = measurement_distribution(out, POVM::computational(2));
  CHECK(p[0] == doctest::Approx(g));
  CHECK(p[0] + p[1] == doctest::Approx(1.0));
}

TEST_CASE("Pauli algebra") {
  const ComplexMatrix xy = pauli_x() * pauli_y();
  CHECK((xy - Complex(0.0, 1.0) * pauli_z()).cwiseAbs().maxCoeff() < 1e-15);
}
