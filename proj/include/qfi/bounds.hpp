#pragma once

// One-parameter information bounds: canonical Kraus operators, spectral
// curves, SLD score and information, the SM bound (spectral and Kraus
// routes), the gap identity, attainability tests, optimal POVMs and the
// classical Fisher information.

#include <optional>
#include <string>
#include <vector>

#include "qfi/channels.hpp"
#include "qfi/linalg.hpp"
#include "qfi/quantum.hpp"

namespace qfi::bounds {

/// Eigenvalues above this count as supported (p_k > 0).
inline constexpr double kSupportTol = 1e-10;
/// Fisher terms with p_m <= kFisherFloor are dropped when |p_m'| <= kFisherSlopeFloor.
inline constexpr double kFisherFloor = 1e-12;
inline constexpr double kFisherSlopeFloor = 1e-8;

enum class GaugeSource { CanonicalKraus, SpectralForm };

const char* to_string(GaugeSource g);

/// Canonical Kraus operators at theta and their derivative along a direction.
///
/// Upsilon_k = sum_i mixing(i, k) E_i with the Gram matrix
/// tr{E_j rho0 E_k^dagger} diagonalized by `mixing`; operators are sorted by
/// descending weight p_k. Across the finite-difference stencil each
/// eigenvector is matched to the centre by maximal overlap and rephased so
/// that the overlap is real positive; the null space is aligned as a block.
struct CanonicalKraus {
  std::vector<ComplexMatrix> ops;
  std::vector<ComplexMatrix> derivative;
  ComplexMatrix mixing;
  RealVector weights;
  double diagonality_residual = 0.0;
  /// A degenerate cluster at the centre was split by the first-order term.
  bool degeneracy_resolved = false;
};

CanonicalKraus canonical_kraus(const ParametricChannel& ch, const ParamPoint& theta,
                               const std::vector<double>& direction, const linalg::DiffConfig& cfg = {});
CanonicalKraus canonical_kraus(const ParametricChannel& ch, double theta, const linalg::DiffConfig& cfg = {});

/// Eigen-data of the output state and its derivative along one direction.
/// Columns are supported eigenvectors first (descending p for Kraus
/// channels, family order for spectral channels), then completions.
struct SpectralCurve {
  ParamPoint theta;
  RealVector p;
  ComplexMatrix w;
  RealVector dp;
  ComplexMatrix dw;
  GaugeSource gauge_source = GaugeSource::CanonicalKraus;
  std::vector<bool> support;
  bool degeneracy_resolved = false;

  int dim() const { return static_cast<int>(p.size()); }
  /// <w_j'|w_k>; when p_j is unsupported the antisymmetric partner
  /// -<w_j|w_k'> is used instead.
  Complex overlap(int j, int k) const;
  ComplexMatrix rho() const;
  ComplexMatrix rho_derivative() const;
  /// Throws NumericError when an invariant fails.
  void validate() const;
};

SpectralCurve spectral_curve(const ParametricChannel& ch, const ParamPoint& theta,
                             const std::vector<double>& direction, const linalg::DiffConfig& cfg = {});
SpectralCurve spectral_curve(const ParametricChannel& ch, double theta, const linalg::DiffConfig& cfg = {});

/// Builds a curve from canonical Kraus data (pure input required).
SpectralCurve curve_from_canonical(const CanonicalKraus& canon, const PureState& input, const ParamPoint& theta);

/// Particular SLD solution in the computational basis.
ComplexMatrix sld_score(const SpectralCurve& sc);
double sld_information(const SpectralCurve& sc);
double sm_bound_spectral(const SpectralCurve& sc);
/// 4 sum_k tr{E_k' rho0 E_k'^dagger}.
double sm_bound_kraus(const std::vector<ComplexMatrix>& ops, const std::vector<ComplexMatrix>& derivative,
                      const DensityMatrix& rho0);
/// 8 sum_{j,k supported} p_j p_k / (p_j + p_k) |<w_j'|w_k>|^2.
double gap_formula(const SpectralCurve& sc);
/// gap_formula checked against C - H; throws NumericError on mismatch.
double bound_gap(const SpectralCurve& sc);

struct Attainability {
  bool attainable = false;
  double residual = 0.0;
};

Attainability attainability_check(const SpectralCurve& sc, double tol);

struct UnitaryCondition {
  Complex value;
  bool attainable = false;
};

/// tr{U rho0 U'^dagger} for a single-element Kraus curve.
UnitaryCondition unitary_attainability(const ParametricChannel& ch, const ParamPoint& theta, double tol,
                                       const linalg::DiffConfig& cfg = {});

/// Eigenprojectors of the SLD; degenerate eigenspaces are merged.
POVM optimal_povm_from_sld(const ComplexMatrix& sld);

struct FisherResult {
  double value = 0.0;
  bool singular = false;
  int dropped_terms = 0;
  std::vector<double> probabilities;
  std::vector<double> slopes;
};

/// Classical Fisher information of a POVM along a direction.
FisherResult fisher_information(const ParametricChannel& ch, const POVM& povm, const ParamPoint& theta,
                                const std::vector<double>& direction, const linalg::DiffConfig& cfg = {});
FisherResult fisher_information(const ParametricChannel& ch, const POVM& povm, double theta,
                                const linalg::DiffConfig& cfg = {});

struct ConditionElement {
  double xi = 0.0;
  double residual = 0.0;
  bool vacuous = false;
};

struct SldConditionReport {
  std::vector<ConditionElement> elements;
  bool satisfied = false;
  double max_residual = 0.0;
};

/// Per-element test of M^{1/2} L rho^{1/2} = xi M^{1/2} rho^{1/2}, xi real.
SldConditionReport povm_sld_condition_check(const POVM& povm, const ComplexMatrix& sld, const DensityMatrix& rho,
                                            double tol);

struct SmConditionReport {
  std::vector<double> xi;  // one per POVM element
  RealMatrix residuals;    // (element, Kraus index)
  bool satisfied = false;
  double max_residual = 0.0;
  std::string caveat;
};

/// Per-element test of M^{1/2} Y_k' rho0^{1/2} = xi M^{1/2} Y_k rho0^{1/2} with
/// one real xi shared by every Kraus index k.
SmConditionReport povm_sm_condition_check(const POVM& povm, const std::vector<ComplexMatrix>& ops,
                                          const std::vector<ComplexMatrix>& derivative, const DensityMatrix& rho0,
                                          double tol);

struct BoundReport {
  ParamPoint theta;
  std::optional<double> fisher;
  bool fisher_singular = false;
  double sld = 0.0;
  double sm = 0.0;
  std::optional<double> sm_representation;  // C_E for the family's own Kraus operators
  double gap = 0.0;
  Attainability attainability;
  std::optional<double> method_cross_check;  // |C(spectral) - C(kraus)|
  std::optional<UnitaryCondition> unitary;
  std::optional<SldConditionReport> sld_condition;
  std::optional<SmConditionReport> sm_condition;
  GaugeSource gauge_source = GaugeSource::CanonicalKraus;
  std::vector<std::string> warnings;
};

/// POVM choice for a report: none, a fixed POVM, or the SLD eigenbasis at theta.
struct PovmChoice {
  enum class Kind { None, Fixed, SldOptimal } kind = Kind::None;
  std::optional<POVM> povm;
};

BoundReport one_parameter_report(const ParametricChannel& ch, const ParamPoint& theta, const PovmChoice& povm,
                                 const linalg::DiffConfig& cfg = {}, double tol = 1e-6);

}  // namespace qfi::bounds
