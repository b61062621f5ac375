#pragma once

// Dense complex-matrix kernel backed by Eigen.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace qfi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace linalg {

/// Eigenvalues within this distance form one degenerate cluster.
inline constexpr double kClusterTol = 1e-8;

struct EigenSystem {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns, orthonormal
};

/// Largest entry magnitude; 0 for empty input.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? 0.0 : static_cast<double>(a.cwiseAbs().maxCoeff());
}

/// max |A - A^dagger| entry.
double hermiticity_defect(const ComplexMatrix& a);

/// Rotates v so that its largest-magnitude entry is real and positive.
void normalize_phase(Eigen::Ref<ComplexVector> v);

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending. Inside a degenerate cluster the eigenvectors
/// are ordered lexicographically by the (Re, Im) parts of their
/// phase-normalized entries, so the output is a deterministic function of
/// the input. Throws ValidationError when the asymmetry exceeds 1e-10.
EigenSystem hermitian_eigendecompose(const ComplexMatrix& a);

/// Real symmetric variant used for information matrices.
RealVector symmetric_eigenvalues(const RealMatrix& a);

/// Square root of a positive semidefinite matrix. Eigenvalues down to -1e-8
/// are clamped to zero; anything more negative is rejected.
ComplexMatrix psd_sqrt(const ComplexMatrix& a);

/// exp(-i * t * h) for Hermitian h.
ComplexMatrix unitary_exp(const ComplexMatrix& h, double t);

struct LoewnerVerdict {
  bool holds = false;
  double min_eigenvalue = 0.0;
};

/// A <= B in Loewner order: min eig(B - A) >= -tol.
LoewnerVerdict loewner_leq(const ComplexMatrix& a, const ComplexMatrix& b, double tol);
LoewnerVerdict loewner_leq(const RealMatrix& a, const RealMatrix& b, double tol);

/// Moore-Penrose pseudo-inverse of a real symmetric matrix; eigenvalues with
/// magnitude below rel_tol * max|eig| are treated as zero.
struct PseudoInverse {
  RealMatrix matrix;
  int rank = 0;
};
PseudoInverse symmetric_pinv(const RealMatrix& a, double rel_tol = 1e-10);

enum class DiffScheme { Central2, Central4 };

struct DiffConfig {
  double step = 1e-4;
  DiffScheme scheme = DiffScheme::Central4;
  bool richardson = false;
};

/// Offsets (in parameter units) and weights such that
/// f'(x) ~= sum_i weight[i] * f(x + offset[i]).
struct Stencil {
  std::vector<double> offsets;
  std::vector<double> weights;

  double reach() const;
};

Stencil make_stencil(const DiffConfig& cfg);

/// Finite-difference derivative of a matrix-valued curve.
ComplexMatrix differentiate_curve(const std::function<ComplexMatrix(double)>& curve, double x,
                                  const DiffConfig& cfg = {});

}  // namespace linalg
}  // namespace qfi
