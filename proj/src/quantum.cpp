#include "qfi/quantum.hpp"

#include <cmath>
#include <sstream>

#include "qfi/errors.hpp"

namespace qfi {

namespace {

constexpr double kNormTol = 1e-10;
constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = 1e-10;
constexpr double kCompletenessTol = 1e-9;
constexpr double kUserTol = 1e-6;

double min_eigenvalue(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << what << " must be a non-empty square matrix (got " << a.rows() << "x" << a.cols() << ")";
    throw ValidationError(msg.str());
  }
}

}  // namespace

Diagnostics validate_density(const ComplexMatrix& rho) {
  Diagnostics d;
  if (rho.rows() == 0 || rho.rows() != rho.cols()) {
    d.hermiticity_defect = std::numeric_limits<double>::infinity();
    return d;
  }
  d.hermiticity_defect = linalg::hermiticity_defect(rho);
  d.trace_defect = std::abs(rho.trace() - Complex(1.0, 0.0));
  d.min_eigenvalue = min_eigenvalue(rho);
  return d;
}

Diagnostics validate_kraus(std::span<const ComplexMatrix> ops) {
  Diagnostics d;
  if (ops.empty()) {
    d.completeness_defect = 1.0;
    return d;
  }
  const Eigen::Index n = ops.front().cols();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& e : ops) {
    if (e.rows() != n || e.cols() != n) {
      d.completeness_defect = std::numeric_limits<double>::infinity();
      return d;
    }
    sum += e.adjoint() * e;
  }
  d.completeness_defect = linalg::max_abs(sum - ComplexMatrix::Identity(n, n));
  return d;
}

Diagnostics validate_povm(std::span<const ComplexMatrix> elements) {
  Diagnostics d;
  if (elements.empty()) {
    d.completeness_defect = 1.0;
    return d;
  }
  const Eigen::Index n = elements.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  d.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& m : elements) {
    if (m.rows() != n || m.cols() != n) {
      d.completeness_defect = std::numeric_limits<double>::infinity();
      return d;
    }
    d.hermiticity_defect = std::max(d.hermiticity_defect, linalg::hermiticity_defect(m));
    d.min_eigenvalue = std::min(d.min_eigenvalue, min_eigenvalue(m));
    sum += m;
  }
  d.completeness_defect = linalg::max_abs(sum - ComplexMatrix::Identity(n, n));
  return d;
}

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw ValidationError("pure state needs at least one amplitude");
  const double defect = std::abs(amplitudes_.squaredNorm() - 1.0);
  if (!(defect <= kNormTol)) {
    std::ostringstream msg;
    msg << "input state is not normalized (norm defect " << defect << ")";
    throw ValidationError(msg.str());
  }
}

PureState PureState::normalized(ComplexVector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw ValidationError("cannot normalize the zero vector");
  return PureState(amplitudes / norm);
}

PureState PureState::basis(int dim, int index) {
  ComplexVector v = ComplexVector::Zero(dim);
  v[index] = 1.0;
  return PureState(std::move(v));
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  require_square(rho_, "density matrix");
  const Diagnostics d = validate_density(rho_);
  std::ostringstream msg;
  if (d.hermiticity_defect > kHermitianTol) {
    msg << "density matrix is not Hermitian (defect " << d.hermiticity_defect << ")";
  } else if (d.trace_defect > kTraceTol) {
    msg << "density matrix trace differs from 1 by " << d.trace_defect;
  } else if (d.min_eigenvalue < -kPsdTol) {
    msg << "density matrix has negative eigenvalue " << d.min_eigenvalue;
  } else {
    return;
  }
  throw ValidationError(msg.str());
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

KrausSet::KrausSet(std::vector<ComplexMatrix> ops, double tol) : ops_(std::move(ops)) {
  if (ops_.empty()) throw ValidationError("Kraus set is empty");
  require_square(ops_.front(), "Kraus operator");
  const Diagnostics d = validate_kraus(ops_);
  if (!(d.completeness_defect <= tol)) {
    std::ostringstream msg;
    msg << "Kraus operators are not complete (max |sum E^dagger E - I| = " << d.completeness_defect << ")";
    throw ValidationError(msg.str());
  }
}

POVM::POVM(std::vector<ComplexMatrix> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ValidationError("POVM is empty");
  require_square(elements_.front(), "POVM element");
  const Diagnostics d = validate_povm(elements_);
  std::ostringstream msg;
  if (d.hermiticity_defect > kHermitianTol) {
    msg << "POVM element is not Hermitian (defect " << d.hermiticity_defect << ")";
  } else if (d.min_eigenvalue < -kPsdTol) {
    msg << "POVM element has negative eigenvalue " << d.min_eigenvalue;
  } else if (!(d.completeness_defect <= kCompletenessTol)) {
    msg << "POVM elements do not sum to the identity (defect " << d.completeness_defect << ")";
  } else {
    return;
  }
  throw ValidationError(msg.str());
}

POVM POVM::computational(int dim) { return from_basis(ComplexMatrix::Identity(dim, dim)); }

POVM POVM::from_basis(const ComplexMatrix& unitary) {
  std::vector<ComplexMatrix> elements;
  for (Eigen::Index k = 0; k < unitary.cols(); ++k) {
    ComplexMatrix p = unitary.col(k) * unitary.col(k).adjoint();
    elements.push_back(0.5 * (p + p.adjoint()));
  }
  return POVM(std::move(elements));
}

DensityMatrix apply_channel(const KrausSet& kraus, const DensityMatrix& rho) {
  if (kraus.dim() != rho.dim()) throw ValidationError("apply_channel: dimension mismatch");
  const Diagnostics d = validate_kraus(kraus.ops());
  if (d.completeness_defect > kUserTol) throw ValidationError("apply_channel: Kraus set is not trace preserving");
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& e : kraus.ops()) out += e * rho.matrix() * e.adjoint();
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

std::vector<double> measurement_distribution(const DensityMatrix& rho, const POVM& povm) {
  if (povm.dim() != rho.dim()) throw ValidationError("measurement_distribution: dimension mismatch");
  std::vector<double> p;
  p.reserve(povm.size());
  double sum = 0.0;
  for (const auto& m : povm.elements()) {
    double v = (rho.matrix() * m).trace().real();
    if (v < -kPsdTol) {
      std::ostringstream msg;
      msg << "negative outcome probability " << v;
      throw ValidationError(msg.str());
    }
    v = std::max(v, 0.0);
    p.push_back(v);
    sum += v;
  }
  if (std::abs(sum - 1.0) > kUserTol) {
    std::ostringstream msg;
    msg << "outcome probabilities sum to " << sum;
    throw ValidationError(msg.str());
  }
  if (std::abs(sum - 1.0) <= kCompletenessTol)
    for (double& v : p) v /= sum;
  return p;
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace qfi
