#pragma once

// Parametric channel families with a uniform differentiable-curve interface.

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfi/linalg.hpp"
#include "qfi/quantum.hpp"

namespace qfi {

/// A point in parameter space; one entry per parameter.
using ParamPoint = std::vector<double>;

/// Closed box of valid parameters.
struct Domain {
  std::vector<double> lo;
  std::vector<double> hi;

  int size() const { return static_cast<int>(lo.size()); }
  bool contains(const ParamPoint& theta) const;
  ParamPoint midpoint() const;
  /// Box corners plus the midpoint; used for spot validation.
  std::vector<ParamPoint> probe_points() const;
};

/// Output spectrum at a point: eigenvalues p (length d), eigenvector columns w
/// (d x d, unitary) and their partial derivatives, one entry per parameter.
struct SpectralData {
  RealVector p;
  ComplexMatrix w;
  std::vector<RealVector> dp;
  std::vector<ComplexMatrix> dw;
};

enum class ChannelForm { KrausCurve, SpectralForm };

class ParametricChannel {
 public:
  using KrausFn = std::function<std::vector<ComplexMatrix>(const ParamPoint&)>;
  /// Partial derivative of every Kraus operator with respect to one parameter.
  using KrausDerivativeFn = std::function<std::vector<ComplexMatrix>(const ParamPoint&, int)>;
  using SpectralFn = std::function<SpectralData(const ParamPoint&)>;

  static ParametricChannel kraus_curve(std::string name, int dim, Domain domain, KrausFn kraus,
                                       KrausDerivativeFn derivative, std::optional<PureState> input);
  static ParametricChannel spectral_form(std::string name, int dim, Domain domain, SpectralFn spectral);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int param_count() const { return domain_.size(); }
  ChannelForm form() const { return form_; }
  const Domain& domain() const { return domain_; }

  bool has_input() const { return input_.has_value(); }
  /// Throws ValidationError when no input state was attached.
  const PureState& input_state() const;
  ParametricChannel with_input(PureState psi) const;
  ParametricChannel with_domain(Domain domain) const;

  /// Kraus operators at theta, completeness-checked (KrausCurve only).
  KrausSet kraus_at(const ParamPoint& theta) const;
  /// Same without the completeness check; used inside stencils.
  std::vector<ComplexMatrix> raw_kraus(const ParamPoint& theta) const;
  bool has_analytic_derivative() const { return static_cast<bool>(kraus_derivative_); }
  std::vector<ComplexMatrix> analytic_kraus_derivative(const ParamPoint& theta, int param) const;

  /// Spectral data (SpectralForm only).
  SpectralData spectral_at(const ParamPoint& theta) const;

  /// Output state rho(theta) for the attached input (KrausCurve) or the
  /// spectral data (SpectralForm).
  ComplexMatrix output_matrix(const ParamPoint& theta) const;

  /// One-parameter channel t -> this(origin + t * direction).
  ParametricChannel slice(const ParamPoint& origin, const std::vector<double>& direction) const;

  /// Checks the form invariants at theta; throws ValidationError with the residual.
  void check_invariants(const ParamPoint& theta) const;

 private:
  ParametricChannel() = default;

  std::string name_;
  int dim_ = 0;
  ChannelForm form_ = ChannelForm::KrausCurve;
  Domain domain_;
  KrausFn kraus_;
  KrausDerivativeFn kraus_derivative_;
  SpectralFn spectral_;
  std::optional<PureState> input_;
};

/// Per-parameter Kraus derivative: analytic when the family supplies it,
/// otherwise element-wise finite differences with fixed element ordering.
std::vector<ComplexMatrix> kraus_derivative(const ParametricChannel& ch, const ParamPoint& theta, int param,
                                            const linalg::DiffConfig& cfg = {});

/// Directional derivative sum_l v_l * dE/dtheta_l.
std::vector<ComplexMatrix> kraus_directional_derivative(const ParametricChannel& ch, const ParamPoint& theta,
                                                        const std::vector<double>& direction,
                                                        const linalg::DiffConfig& cfg = {});

/// Derivative of the output state along a direction.
ComplexMatrix output_derivative(const ParametricChannel& ch, const ParamPoint& theta,
                                const std::vector<double>& direction, const linalg::DiffConfig& cfg = {});

/// Affine map c0 + c1 * theta1 + c2 * theta2, clamped to [0, 1].
using AffineCoefficients = std::array<double, 3>;

/// Data for the file-defined spectral family:
///   p_k(theta) = p0_k + sum_l slope[l]_k * theta_l
///   w_k(theta) = exp(-i theta_m G_m) ... exp(-i theta_1 G_1) basis_k
struct CustomSpectral {
  int dim = 0;
  int params = 1;
  RealVector p0;
  std::vector<RealVector> slopes;
  ComplexMatrix basis;
  std::vector<ComplexMatrix> generators;
};

struct FamilyOptions {
  char axis = 'z';
  AffineCoefficients f{0.0, 1.0, 0.0};
  AffineCoefficients g{0.0, 0.0, 1.0};
  std::optional<CustomSpectral> custom;
};

/// Names accepted by builtin().
std::vector<std::string> builtin_families();

/// Built-in family with analytic derivatives populated. Throws
/// ValidationError for unknown names or out-of-domain options.
ParametricChannel builtin(std::string_view family, const FamilyOptions& options = {});

/// Unitary curve V(theta) = exp(-i theta_m G_m) ... exp(-i theta_1 G_1) V0 and
/// its analytic partial derivatives.
class ProductExponential {
 public:
  ProductExponential(ComplexMatrix base, std::vector<ComplexMatrix> generators);

  int params() const { return static_cast<int>(generators_.size()); }
  ComplexMatrix value(const ParamPoint& theta) const;
  ComplexMatrix partial(const ParamPoint& theta, int param) const;

 private:
  ComplexMatrix base_;
  std::vector<ComplexMatrix> generators_;
};

/// Kraus set E_j(theta) = sum_k u_jk(theta) F_k(theta) where u is a product
/// exponential. Fixed remixings use empty generators.
ParametricChannel remix(const ParametricChannel& ch, const ProductExponential& mixing);

}  // namespace qfi
