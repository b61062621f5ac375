#pragma once

// Multi-parameter information matrices, Loewner comparisons and
// directional-reduction checks.

#include <optional>
#include <string>
#include <vector>

#include "qfi/bounds.hpp"

namespace qfi::bounds {

/// Spectral data at theta with one derivative slice per parameter. Every
/// slice shares p and w; only dp and dw differ.
struct MultiSpectralCurve {
  ParamPoint theta;
  std::vector<SpectralCurve> slices;

  int params() const { return static_cast<int>(slices.size()); }
  /// Per-slice invariants plus agreement of p and w across slices.
  void validate() const;
};

MultiSpectralCurve multi_spectral_curve(const ParametricChannel& ch, const ParamPoint& theta,
                                        const linalg::DiffConfig& cfg = {});

enum class InfoKind { Fisher, Sld, Sm };

const char* to_string(InfoKind k);

struct InfoMatrix {
  RealMatrix entries;
  InfoKind kind = InfoKind::Sld;
  /// Fisher only: an outcome with p_m = 0 has a nonzero slope.
  bool singular = false;
  int dropped_terms = 0;
};

InfoMatrix fisher_matrix(const ParametricChannel& ch, const POVM& povm, const ParamPoint& theta,
                         const linalg::DiffConfig& cfg = {});
/// H_jk = Re tr{L_j rho L_k} with each L_j from the matching slice.
InfoMatrix sld_matrix(const MultiSpectralCurve& msc);
/// Kraus curves: 4 Re sum_a tr{Y_a^(j) rho0 Y_a^(k)dagger}. Spectral
/// families: the bilinear form whose diagonal is the one-parameter bound.
InfoMatrix sm_matrix(const ParametricChannel& ch, const ParamPoint& theta, const linalg::DiffConfig& cfg = {});
InfoMatrix sm_matrix(const MultiSpectralCurve& msc);

struct MultiAttainability {
  bool attainable = false;
  double residual = 0.0;
  /// Supported eigenvectors do not move.
  bool quasi_classical = false;
  /// Exactly one supported eigenvalue.
  bool unitary = false;
};

MultiAttainability multi_attainability_check(const MultiSpectralCurve& msc, double tol);

struct LoewnerReport {
  double tol = 0.0;
  std::optional<linalg::LoewnerVerdict> fisher_le_sld;
  linalg::LoewnerVerdict sld_le_sm;
  std::optional<linalg::LoewnerVerdict> fisher_le_sm;
  bool all_hold() const;
};

/// Verdicts for F <= H, H <= C and F <= C with slack 1e-8 * (1 + max|C|).
LoewnerReport loewner_report(const std::optional<InfoMatrix>& fisher, const InfoMatrix& sld, const InfoMatrix& sm);

struct DirectionalReport {
  std::vector<double> direction;
  /// Kraus curves only: max |d/dt Y_k - sum_l v_l Y_k^(l)|, relative.
  std::optional<double> kraus_residual;
  double sld_slice = 0.0;
  double sld_quadratic = 0.0;
  double sm_slice = 0.0;
  double sm_quadratic = 0.0;
  double max_relative_error = 0.0;
  bool passed = false;
};

/// Compares the one-parameter channel t -> ch(theta + t v) at t = 0 against
/// the matrix quantities contracted with v.
DirectionalReport directional_reduction_check(const ParametricChannel& ch, const ParamPoint& theta,
                                              const std::vector<double>& direction,
                                              const linalg::DiffConfig& cfg = {}, double tol = 1e-5);

/// Covariance floor pinv(I) / N with the rank of I disclosed.
struct CramerRaoFloor {
  RealMatrix covariance;
  int rank = 0;
  bool full_rank = false;
};

CramerRaoFloor cramer_rao_floor(const InfoMatrix& info, double shots);

struct MatrixReport {
  ParamPoint theta;
  std::optional<InfoMatrix> fisher;
  InfoMatrix sld;
  InfoMatrix sm;
  MultiAttainability attainability;
  LoewnerReport loewner;
  /// pinv(H) for a single shot, with rank disclosure.
  CramerRaoFloor sld_floor;
  GaugeSource gauge_source = GaugeSource::CanonicalKraus;
  std::vector<std::string> warnings;
};

/// Matrix report for channels with two or more parameters; only fixed POVMs
/// are accepted for the Fisher matrix.
MatrixReport multi_parameter_report(const ParametricChannel& ch, const ParamPoint& theta, const PovmChoice& povm,
                                    const linalg::DiffConfig& cfg = {}, double tol = 1e-6);

}  // namespace qfi::bounds
