#pragma once

// Validated quantum primitives: states, Kraus sets, POVMs.

#include <span>
#include <vector>

#include "qfi/linalg.hpp"

namespace qfi {

/// Per-invariant residuals. Fields that do not apply to the validated kind
/// are left at zero.
struct Diagnostics {
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double completeness_defect = 0.0;
  double min_eigenvalue = 0.0;
};

Diagnostics validate_density(const ComplexMatrix& rho);
Diagnostics validate_kraus(std::span<const ComplexMatrix> ops);
Diagnostics validate_povm(std::span<const ComplexMatrix> elements);

class PureState {
 public:
  /// Rejects vectors whose squared norm differs from 1 by more than 1e-10.
  explicit PureState(ComplexVector amplitudes);

  /// Normalizes first; rejects the zero vector.
  static PureState normalized(ComplexVector amplitudes);
  static PureState basis(int dim, int index);

  const ComplexVector& amplitudes() const { return amplitudes_; }
  int dim() const { return static_cast<int>(amplitudes_.size()); }
  ComplexMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  ComplexVector amplitudes_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix rho);
  explicit DensityMatrix(const PureState& psi) : DensityMatrix(psi.projector()) {}

  const ComplexMatrix& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }
  double purity() const;
  bool is_pure(double tol = 1e-9) const { return std::abs(purity() - 1.0) < tol; }

 private:
  ComplexMatrix rho_;
};

class KrausSet {
 public:
  /// Rejects sets whose completeness defect max|sum E^dagger E - I| exceeds tol.
  explicit KrausSet(std::vector<ComplexMatrix> ops, double tol = 1e-9);

  const std::vector<ComplexMatrix>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  int dim() const { return static_cast<int>(ops_.front().rows()); }
  const ComplexMatrix& operator[](std::size_t k) const { return ops_[k]; }

 private:
  std::vector<ComplexMatrix> ops_;
};

class POVM {
 public:
  explicit POVM(std::vector<ComplexMatrix> elements);

  static POVM computational(int dim);
  /// Rank-1 projectors onto the columns of a unitary.
  static POVM from_basis(const ComplexMatrix& unitary);

  const std::vector<ComplexMatrix>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  int dim() const { return static_cast<int>(elements_.front().rows()); }
  const ComplexMatrix& operator[](std::size_t m) const { return elements_[m]; }

 private:
  std::vector<ComplexMatrix> elements_;
};

/// sum_k E_k rho E_k^dagger.
DensityMatrix apply_channel(const KrausSet& kraus, const DensityMatrix& rho);

/// Born-rule probabilities tr{rho M_m}. Entries in [-1e-10, 0) are clamped
/// to zero and a sum within 1e-9 of one is renormalized.
std::vector<double> measurement_distribution(const DensityMatrix& rho, const POVM& povm);

/// Pauli matrices and the 2x2 identity.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

}  // namespace qfi
