#include "qfi/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qfi/errors.hpp"

namespace qfi {

namespace {

constexpr double kDomainSlack = 1e-12;
constexpr double kSpectralTol = 1e-10;
constexpr Complex kI{0.0, 1.0};

ComplexMatrix identity2() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix pauli(char axis) {
  switch (axis) {
    case 'x': return pauli_x();
    case 'y': return pauli_y();
    case 'z': return pauli_z();
    default: break;
  }
  std::ostringstream msg;
  msg << "rotation axis must be x, y or z (got '" << axis << "')";
  throw ValidationError(msg.str());
}

ComplexVector plus_state() {
  ComplexVector v(2);
  v << 1.0, 1.0;
  return v / std::sqrt(2.0);
}

void require_param(int param, int count) {
  if (param < 0 || param >= count) throw ValidationError("parameter index out of range");
}

ParamPoint shifted(const ParamPoint& theta, const std::vector<double>& direction, double t) {
  ParamPoint out = theta;
  for (std::size_t l = 0; l < out.size(); ++l) out[l] += t * direction[l];
  return out;
}

std::vector<double> unit_direction(int count, int param) {
  std::vector<double> v(static_cast<std::size_t>(count), 0.0);
  v[static_cast<std::size_t>(param)] = 1.0;
  return v;
}

// --- one-parameter Kraus families -------------------------------------------

ParametricChannel dephasing() {
  auto kraus = [](const ParamPoint& t) {
    return std::vector<ComplexMatrix>{std::sqrt(1.0 - t[0]) * identity2(), std::sqrt(t[0]) * pauli_z()};
  };
  auto deriv = [](const ParamPoint& t, int) {
    return std::vector<ComplexMatrix>{(-0.5 / std::sqrt(1.0 - t[0])) * identity2(),
                                      (0.5 / std::sqrt(t[0])) * pauli_z()};
  };
  return ParametricChannel::kraus_curve("dephasing", 2, Domain{{0.0}, {1.0}}, kraus, deriv,
                                        PureState(plus_state()));
}

std::vector<ComplexMatrix> damping_ops(double gamma) {
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix e1 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - gamma);
  e1(0, 1) = std::sqrt(gamma);
  return {e0, e1};
}

std::vector<ComplexMatrix> damping_derivative(double gamma) {
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix e1 = ComplexMatrix::Zero(2, 2);
  e0(1, 1) = -0.5 / std::sqrt(1.0 - gamma);
  e1(0, 1) = 0.5 / std::sqrt(gamma);
  return {e0, e1};
}

ParametricChannel amplitude_damping() {
  auto kraus = [](const ParamPoint& t) { return damping_ops(t[0]); };
  auto deriv = [](const ParamPoint& t, int) { return damping_derivative(t[0]); };
  return ParametricChannel::kraus_curve("amplitude-damping", 2, Domain{{0.0}, {1.0}}, kraus, deriv,
                                        PureState(plus_state()));
}

ParametricChannel depolarizing() {
  auto kraus = [](const ParamPoint& t) {
    const double a = std::sqrt(1.0 - 0.75 * t[0]);
    const double b = std::sqrt(0.25 * t[0]);
    return std::vector<ComplexMatrix>{a * identity2(), b * pauli_x(), b * pauli_y(), b * pauli_z()};
  };
  auto deriv = [](const ParamPoint& t, int) {
    const double da = -0.375 / std::sqrt(1.0 - 0.75 * t[0]);
    const double db = 0.125 / std::sqrt(0.25 * t[0]);
    return std::vector<ComplexMatrix>{da * identity2(), db * pauli_x(), db * pauli_y(), db * pauli_z()};
  };
  return ParametricChannel::kraus_curve("depolarizing", 2, Domain{{0.0}, {1.0}}, kraus, deriv,
                                        PureState::basis(2, 0));
}

ComplexMatrix rotation_unitary(const ComplexMatrix& sigma, double angle) {
  return std::cos(0.5 * angle) * identity2() - kI * std::sin(0.5 * angle) * sigma;
}

ParametricChannel rotation(char axis) {
  const ComplexMatrix sigma = pauli(axis);
  auto kraus = [sigma](const ParamPoint& t) { return std::vector<ComplexMatrix>{rotation_unitary(sigma, t[0])}; };
  auto deriv = [sigma](const ParamPoint& t, int) {
    return std::vector<ComplexMatrix>{(-0.5 * kI) * sigma * rotation_unitary(sigma, t[0])};
  };
  std::string name = "rotation-";
  name += axis;
  return ParametricChannel::kraus_curve(name, 2, Domain{{-std::numbers::pi}, {std::numbers::pi}}, kraus, deriv,
                                        PureState::basis(2, 0));
}

// --- two-parameter Kraus families -------------------------------------------

ParametricChannel dephasing2() {
  auto kraus = [](const ParamPoint& t) {
    const double q = t[0] * t[1];
    return std::vector<ComplexMatrix>{std::sqrt(1.0 - q) * identity2(), std::sqrt(q) * pauli_z()};
  };
  auto deriv = [](const ParamPoint& t, int l) {
    const double q = t[0] * t[1];
    const double dq = l == 0 ? t[1] : t[0];
    return std::vector<ComplexMatrix>{(-0.5 * dq / std::sqrt(1.0 - q)) * identity2(),
                                      (0.5 * dq / std::sqrt(q)) * pauli_z()};
  };
  return ParametricChannel::kraus_curve("dephasing2", 2, Domain{{0.0, 0.0}, {1.0, 1.0}}, kraus, deriv,
                                        PureState(plus_state()));
}

// U = cos(r/2) I - i s(r) (t1 sx + t2 sy), s(r) = sin(r/2)/r
ParametricChannel rotation2() {
  auto unitary = [](const ParamPoint& t) {
    const double r = std::hypot(t[0], t[1]);
    const double s = r < 1e-8 ? 0.5 - r * r / 48.0 : std::sin(0.5 * r) / r;
    const ComplexMatrix gen = t[0] * pauli_x() + t[1] * pauli_y();
    return ComplexMatrix(std::cos(0.5 * r) * identity2() - kI * s * gen);
  };
  auto kraus = [unitary](const ParamPoint& t) { return std::vector<ComplexMatrix>{unitary(t)}; };
  auto deriv = [](const ParamPoint& t, int l) {
    const double r = std::hypot(t[0], t[1]);
    const double tl = t[static_cast<std::size_t>(l)];
    const ComplexMatrix gen = t[0] * pauli_x() + t[1] * pauli_y();
    const ComplexMatrix sigma = l == 0 ? pauli_x() : pauli_y();
    double cos_part;  // d cos(r/2) / d t_l
    double s;         // s(r)
    double ds_part;   // d s(r) / d t_l
    if (r < 1e-4) {
      cos_part = -0.25 * tl * (1.0 - r * r / 24.0);
      s = 0.5 - r * r / 48.0;
      ds_part = -tl / 24.0;
    } else {
      cos_part = -0.5 * std::sin(0.5 * r) * tl / r;
      s = std::sin(0.5 * r) / r;
      ds_part = (0.5 * r * std::cos(0.5 * r) - std::sin(0.5 * r)) / (r * r) * tl / r;
    }
    return std::vector<ComplexMatrix>{cos_part * identity2() - kI * (ds_part * gen + s * sigma)};
  };
  return ParametricChannel::kraus_curve("rotation2", 2,
                                        Domain{{-std::numbers::pi, -std::numbers::pi},
                                               {std::numbers::pi, std::numbers::pi}},
                                        kraus, deriv, PureState::basis(2, 0));
}

// amplitude damping by theta1 followed by a z rotation by theta2
ParametricChannel damped_rotation() {
  auto kraus = [](const ParamPoint& t) {
    const ComplexMatrix rz = rotation_unitary(pauli_z(), t[1]);
    auto ops = damping_ops(t[0]);
    for (auto& e : ops) e = rz * e;
    return ops;
  };
  auto deriv = [](const ParamPoint& t, int l) {
    const ComplexMatrix rz = rotation_unitary(pauli_z(), t[1]);
    std::vector<ComplexMatrix> ops;
    if (l == 0) {
      ops = damping_derivative(t[0]);
      for (auto& e : ops) e = rz * e;
    } else {
      ops = damping_ops(t[0]);
      for (auto& e : ops) e = (-0.5 * kI) * pauli_z() * rz * e;
    }
    return ops;
  };
  return ParametricChannel::kraus_curve("damped-rotation", 2,
                                        Domain{{0.0, -std::numbers::pi}, {1.0, std::numbers::pi}}, kraus, deriv,
                                        PureState(plus_state()));
}

// --- spectral families ------------------------------------------------------

// rho = a^2 |v1><v1| + (1 - a^2) |e3><e3|, v1 = (b, sqrt(1 - b^2), 0); the
// third eigenvector completes the basis inside span(e1, e2).
struct TwoLevelGeometry {
  RealVector p;
  ComplexMatrix w;
  RealVector dp_da;
  ComplexMatrix dw_db;
};

TwoLevelGeometry example_geometry(double a, double b) {
  TwoLevelGeometry out;
  const double c = std::sqrt(std::max(0.0, 1.0 - b * b));
  out.p = RealVector(3);
  out.p << a * a, 1.0 - a * a, 0.0;
  out.w = ComplexMatrix::Zero(3, 3);
  out.w(0, 0) = b;
  out.w(1, 0) = c;
  out.w(2, 1) = 1.0;
  out.w(0, 2) = c;
  out.w(1, 2) = -b;
  out.dp_da = RealVector(3);
  out.dp_da << 2.0 * a, -2.0 * a, 0.0;
  out.dw_db = ComplexMatrix::Zero(3, 3);
  out.dw_db(0, 0) = 1.0;
  out.dw_db(1, 0) = -b / c;
  out.dw_db(0, 2) = -b / c;
  out.dw_db(1, 2) = -1.0;
  return out;
}

ParametricChannel example1() {
  auto spectral = [](const ParamPoint& t) {
    const TwoLevelGeometry geo = example_geometry(t[0], t[0]);
    return SpectralData{geo.p, geo.w, {geo.dp_da}, {geo.dw_db}};
  };
  return ParametricChannel::spectral_form("example1", 3, Domain{{0.0}, {1.0}}, spectral);
}

struct ClampedAffine {
  double value;
  std::array<double, 2> grad;
};

ClampedAffine eval_affine(const AffineCoefficients& c, const ParamPoint& t) {
  const double raw = c[0] + c[1] * t[0] + c[2] * t[1];
  if (raw <= 0.0) return {0.0, {0.0, 0.0}};
  if (raw >= 1.0) return {1.0, {0.0, 0.0}};
  return {raw, {c[1], c[2]}};
}

ParametricChannel example2(const AffineCoefficients& f, const AffineCoefficients& g) {
  for (double c : f)
    if (!std::isfinite(c)) throw ValidationError("example2: non-finite f coefficient");
  for (double c : g)
    if (!std::isfinite(c)) throw ValidationError("example2: non-finite g coefficient");
  auto spectral = [f, g](const ParamPoint& t) {
    const ClampedAffine fv = eval_affine(f, t);
    const ClampedAffine gv = eval_affine(g, t);
    const TwoLevelGeometry geo = example_geometry(fv.value, gv.value);
    SpectralData out{geo.p, geo.w, {}, {}};
    for (int l = 0; l < 2; ++l) {
      out.dp.push_back(fv.grad[static_cast<std::size_t>(l)] * geo.dp_da);
      out.dw.push_back(gv.grad[static_cast<std::size_t>(l)] * geo.dw_db);
    }
    return out;
  };
  return ParametricChannel::spectral_form("example2", 3, Domain{{0.0, 0.0}, {1.0, 1.0}}, spectral);
}

ParametricChannel custom_spectral(const CustomSpectral& spec) {
  const int d = spec.dim;
  const int m = spec.params;
  if (d < 1 || m < 1) throw ValidationError("custom-spectral: dim and params must be positive");
  if (spec.p0.size() != d) throw ValidationError("custom-spectral: p0 must have dim entries");
  if (static_cast<int>(spec.slopes.size()) != m) throw ValidationError("custom-spectral: need one slope per parameter");
  for (const auto& s : spec.slopes) {
    if (s.size() != d) throw ValidationError("custom-spectral: slope must have dim entries");
    if (std::abs(s.sum()) > kSpectralTol) {
      std::ostringstream msg;
      msg << "custom-spectral: slope entries must sum to 0 (residual " << std::abs(s.sum()) << ")";
      throw ValidationError(msg.str());
    }
  }
  if (std::abs(spec.p0.sum() - 1.0) > kSpectralTol) {
    std::ostringstream msg;
    msg << "custom-spectral: p0 must sum to 1 (residual " << std::abs(spec.p0.sum() - 1.0) << ")";
    throw ValidationError(msg.str());
  }
  if (spec.basis.rows() != d || spec.basis.cols() != d) throw ValidationError("custom-spectral: basis must be dim x dim");
  const double unitarity = linalg::max_abs(spec.basis.adjoint() * spec.basis - ComplexMatrix::Identity(d, d));
  if (unitarity > kSpectralTol) {
    std::ostringstream msg;
    msg << "custom-spectral: basis is not unitary (residual " << unitarity << ")";
    throw ValidationError(msg.str());
  }
  std::vector<ComplexMatrix> generators = spec.generators;
  if (generators.empty()) generators.assign(static_cast<std::size_t>(m), ComplexMatrix::Zero(d, d));
  if (static_cast<int>(generators.size()) != m) throw ValidationError("custom-spectral: need one generator per parameter");
  for (const auto& gen : generators) {
    if (gen.rows() != d || gen.cols() != d) throw ValidationError("custom-spectral: generator must be dim x dim");
    const double herm = linalg::hermiticity_defect(gen);
    if (herm > kSpectralTol) {
      std::ostringstream msg;
      msg << "custom-spectral: generator is not Hermitian (residual " << herm << ")";
      throw ValidationError(msg.str());
    }
  }
  const ProductExponential rotation(spec.basis, generators);
  auto spectral = [spec, rotation, m](const ParamPoint& t) {
    SpectralData out;
    out.p = spec.p0;
    for (int l = 0; l < m; ++l) out.p += t[static_cast<std::size_t>(l)] * spec.slopes[static_cast<std::size_t>(l)];
    out.w = rotation.value(t);
    for (int l = 0; l < m; ++l) {
      out.dp.push_back(spec.slopes[static_cast<std::size_t>(l)]);
      out.dw.push_back(rotation.partial(t, l));
    }
    return out;
  };
  return ParametricChannel::spectral_form("custom-spectral", d,
                                          Domain{std::vector<double>(static_cast<std::size_t>(m), 0.0),
                                                 std::vector<double>(static_cast<std::size_t>(m), 1.0)},
                                          spectral);
}

}  // namespace

// --- Domain -------------------------------------------------------------------

bool Domain::contains(const ParamPoint& theta) const {
  if (static_cast<int>(theta.size()) != size()) return false;
  for (std::size_t l = 0; l < theta.size(); ++l) {
    if (!std::isfinite(theta[l])) return false;
    if (theta[l] < lo[l] - kDomainSlack || theta[l] > hi[l] + kDomainSlack) return false;
  }
  return true;
}

ParamPoint Domain::midpoint() const {
  ParamPoint mid(lo.size());
  for (std::size_t l = 0; l < lo.size(); ++l) mid[l] = 0.5 * (lo[l] + hi[l]);
  return mid;
}

std::vector<ParamPoint> Domain::probe_points() const {
  std::vector<ParamPoint> out{midpoint()};
  const std::size_t m = lo.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    ParamPoint corner(m);
    for (std::size_t l = 0; l < m; ++l) corner[l] = (mask >> l) & 1U ? hi[l] : lo[l];
    out.push_back(std::move(corner));
  }
  return out;
}

// --- ParametricChannel --------------------------------------------------------

ParametricChannel ParametricChannel::kraus_curve(std::string name, int dim, Domain domain, KrausFn kraus,
                                                 KrausDerivativeFn derivative, std::optional<PureState> input) {
  ParametricChannel ch;
  ch.name_ = std::move(name);
  ch.dim_ = dim;
  ch.form_ = ChannelForm::KrausCurve;
  ch.domain_ = std::move(domain);
  ch.kraus_ = std::move(kraus);
  ch.kraus_derivative_ = std::move(derivative);
  if (input && input->dim() != dim) throw ValidationError("input state dimension does not match the channel");
  ch.input_ = std::move(input);
  return ch;
}

ParametricChannel ParametricChannel::spectral_form(std::string name, int dim, Domain domain, SpectralFn spectral) {
  ParametricChannel ch;
  ch.name_ = std::move(name);
  ch.dim_ = dim;
  ch.form_ = ChannelForm::SpectralForm;
  ch.domain_ = std::move(domain);
  ch.spectral_ = std::move(spectral);
  return ch;
}

const PureState& ParametricChannel::input_state() const {
  if (!input_) throw ValidationError("channel '" + name_ + "' has no input state");
  return *input_;
}

ParametricChannel ParametricChannel::with_input(PureState psi) const {
  if (psi.dim() != dim_) throw ValidationError("input state dimension does not match the channel");
  ParametricChannel out = *this;
  out.input_ = std::move(psi);
  return out;
}

ParametricChannel ParametricChannel::with_domain(Domain domain) const {
  if (domain.size() != param_count() || domain.hi.size() != domain.lo.size())
    throw ValidationError("domain must have one interval per parameter");
  for (int l = 0; l < domain.size(); ++l) {
    const auto i = static_cast<std::size_t>(l);
    if (!(domain.lo[i] < domain.hi[i])) throw ValidationError("domain interval must satisfy a < b");
  }
  ParametricChannel out = *this;
  out.domain_ = std::move(domain);
  return out;
}

std::vector<ComplexMatrix> ParametricChannel::raw_kraus(const ParamPoint& theta) const {
  if (form_ != ChannelForm::KrausCurve) throw ValidationError("channel '" + name_ + "' has no Kraus curve");
  if (static_cast<int>(theta.size()) != param_count()) throw ValidationError("parameter vector has wrong length");
  return kraus_(theta);
}

KrausSet ParametricChannel::kraus_at(const ParamPoint& theta) const {
  if (!domain_.contains(theta)) throw ValidationError("parameter outside the channel domain");
  return KrausSet(raw_kraus(theta));
}

std::vector<ComplexMatrix> ParametricChannel::analytic_kraus_derivative(const ParamPoint& theta, int param) const {
  if (!kraus_derivative_) throw ValidationError("channel '" + name_ + "' has no analytic Kraus derivative");
  require_param(param, param_count());
  return kraus_derivative_(theta, param);
}

SpectralData ParametricChannel::spectral_at(const ParamPoint& theta) const {
  if (form_ != ChannelForm::SpectralForm) throw ValidationError("channel '" + name_ + "' has no spectral form");
  if (static_cast<int>(theta.size()) != param_count()) throw ValidationError("parameter vector has wrong length");
  return spectral_(theta);
}

ComplexMatrix ParametricChannel::output_matrix(const ParamPoint& theta) const {
  if (form_ == ChannelForm::SpectralForm) {
    const SpectralData s = spectral_at(theta);
    ComplexMatrix rho = s.w * s.p.cast<Complex>().asDiagonal() * s.w.adjoint();
    return 0.5 * (rho + rho.adjoint());
  }
  const ComplexMatrix rho0 = input_state().projector();
  ComplexMatrix rho = ComplexMatrix::Zero(dim_, dim_);
  for (const auto& e : raw_kraus(theta)) rho += e * rho0 * e.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

ParametricChannel ParametricChannel::slice(const ParamPoint& origin, const std::vector<double>& direction) const {
  const int m = param_count();
  if (static_cast<int>(origin.size()) != m || static_cast<int>(direction.size()) != m)
    throw ValidationError("slice: origin and direction must have one entry per parameter");
  if (!domain_.contains(origin)) throw ValidationError("slice: origin outside the channel domain");
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < origin.size(); ++l) {
    const double v = direction[l];
    if (v == 0.0) continue;
    const double a = (domain_.lo[l] - origin[l]) / v;
    const double b = (domain_.hi[l] - origin[l]) / v;
    tmin = std::max(tmin, std::min(a, b));
    tmax = std::min(tmax, std::max(a, b));
  }
  if (!std::isfinite(tmin) || !std::isfinite(tmax)) throw ValidationError("slice: direction must be nonzero");

  ParametricChannel out;
  out.name_ = name_ + "/slice";
  out.dim_ = dim_;
  out.form_ = form_;
  out.domain_ = Domain{{tmin}, {tmax}};
  out.input_ = input_;
  const ParametricChannel base = *this;
  if (form_ == ChannelForm::KrausCurve) {
    out.kraus_ = [base, origin, direction](const ParamPoint& t) {
      return base.raw_kraus(shifted(origin, direction, t[0]));
    };
    if (kraus_derivative_) {
      out.kraus_derivative_ = [base, origin, direction](const ParamPoint& t, int) {
        const ParamPoint at = shifted(origin, direction, t[0]);
        std::vector<ComplexMatrix> acc;
        for (int l = 0; l < base.param_count(); ++l) {
          const double v = direction[static_cast<std::size_t>(l)];
          if (v == 0.0) continue;
          auto part = base.analytic_kraus_derivative(at, l);
          if (acc.empty()) {
            acc.resize(part.size());
            for (std::size_t k = 0; k < part.size(); ++k) acc[k] = ComplexMatrix::Zero(part[k].rows(), part[k].cols());
          }
          for (std::size_t k = 0; k < part.size(); ++k) acc[k] += v * part[k];
        }
        return acc;
      };
    }
  } else {
    out.spectral_ = [base, origin, direction](const ParamPoint& t) {
      SpectralData s = base.spectral_at(shifted(origin, direction, t[0]));
      SpectralData o{s.p, s.w, {RealVector::Zero(s.p.size())}, {ComplexMatrix::Zero(s.w.rows(), s.w.cols())}};
      for (std::size_t l = 0; l < direction.size(); ++l) {
        o.dp[0] += direction[l] * s.dp[l];
        o.dw[0] += direction[l] * s.dw[l];
      }
      return o;
    };
  }
  return out;
}

void ParametricChannel::check_invariants(const ParamPoint& theta) const {
  std::ostringstream msg;
  msg.precision(3);
  if (form_ == ChannelForm::KrausCurve) {
    const Diagnostics d = validate_kraus(raw_kraus(theta));
    if (!(d.completeness_defect <= 1e-9)) {
      msg << "channel '" << name_ << "' violates Kraus completeness at theta (defect " << d.completeness_defect
          << ")";
      throw ValidationError(msg.str());
    }
    return;
  }
  const SpectralData s = spectral_at(theta);
  if (s.p.size() != dim_ || s.w.rows() != dim_ || s.w.cols() != dim_) {
    throw ValidationError("channel '" + name_ + "' spectral data has wrong dimensions");
  }
  if (static_cast<int>(s.dp.size()) != param_count() || static_cast<int>(s.dw.size()) != param_count()) {
    throw ValidationError("channel '" + name_ + "' spectral data lacks per-parameter derivatives");
  }
  const double sum_defect = std::abs(s.p.sum() - 1.0);
  const double ortho = linalg::max_abs(s.w.adjoint() * s.w - ComplexMatrix::Identity(dim_, dim_));
  const double min_p = s.p.minCoeff();
  if (sum_defect > kSpectralTol) {
    msg << "channel '" << name_ << "' eigenvalues sum to 1 + " << s.p.sum() - 1.0;
  } else if (ortho > kSpectralTol) {
    msg << "channel '" << name_ << "' eigenvectors are not orthonormal (defect " << ortho << ")";
  } else if (min_p < -kSpectralTol) {
    msg << "channel '" << name_ << "' has negative eigenvalue " << min_p;
  } else {
    return;
  }
  throw ValidationError(msg.str());
}

// --- derivatives ------------------------------------------------------------

std::vector<ComplexMatrix> kraus_derivative(const ParametricChannel& ch, const ParamPoint& theta, int param,
                                            const linalg::DiffConfig& cfg) {
  require_param(param, ch.param_count());
  return kraus_directional_derivative(ch, theta, unit_direction(ch.param_count(), param), cfg);
}

std::vector<ComplexMatrix> kraus_directional_derivative(const ParametricChannel& ch, const ParamPoint& theta,
                                                        const std::vector<double>& direction,
                                                        const linalg::DiffConfig& cfg) {
  if (ch.form() != ChannelForm::KrausCurve)
    throw ValidationError("channel '" + ch.name() + "' is given in spectral form; there is no Kraus curve");
  if (static_cast<int>(direction.size()) != ch.param_count())
    throw ValidationError("direction must have one entry per parameter");
  if (ch.has_analytic_derivative()) {
    std::vector<ComplexMatrix> acc;
    for (int l = 0; l < ch.param_count(); ++l) {
      const double v = direction[static_cast<std::size_t>(l)];
      auto part = ch.analytic_kraus_derivative(theta, l);
      if (acc.empty())
        for (const auto& e : part) acc.push_back(ComplexMatrix::Zero(e.rows(), e.cols()));
      if (v == 0.0) continue;
      for (std::size_t k = 0; k < part.size(); ++k) acc[k] += v * part[k];
    }
    return acc;
  }
  const linalg::Stencil st = linalg::make_stencil(cfg);
  std::vector<ComplexMatrix> acc;
  for (std::size_t i = 0; i < st.offsets.size(); ++i) {
    const ParamPoint at = shifted(theta, direction, st.offsets[i]);
    if (!ch.domain().contains(at)) throw ValidationError("finite-difference stencil leaves the channel domain");
    auto ops = ch.raw_kraus(at);
    if (acc.empty())
      for (const auto& e : ops) acc.push_back(ComplexMatrix::Zero(e.rows(), e.cols()));
    if (ops.size() != acc.size()) throw NumericError("Kraus element count changes inside the stencil");
    for (std::size_t k = 0; k < ops.size(); ++k) acc[k] += st.weights[i] * ops[k];
  }
  return acc;
}

ComplexMatrix output_derivative(const ParametricChannel& ch, const ParamPoint& theta,
                                const std::vector<double>& direction, const linalg::DiffConfig& cfg) {
  const int d = ch.dim();
  if (ch.form() == ChannelForm::SpectralForm) {
    const SpectralData s = ch.spectral_at(theta);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (std::size_t l = 0; l < direction.size(); ++l) {
      const double v = direction[l];
      if (v == 0.0) continue;
      for (int k = 0; k < d; ++k) {
        const ComplexVector wk = s.w.col(k);
        const ComplexVector dwk = s.dw[l].col(k);
        out += v * (s.dp[l][k] * wk * wk.adjoint() + s.p[k] * (dwk * wk.adjoint() + wk * dwk.adjoint()));
      }
    }
    return 0.5 * (out + out.adjoint());
  }
  const ComplexMatrix rho0 = ch.input_state().projector();
  const auto ops = ch.raw_kraus(theta);
  const auto dops = kraus_directional_derivative(ch, theta, direction, cfg);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const ComplexMatrix term = dops[k] * rho0 * ops[k].adjoint();
    out += term + term.adjoint();
  }
  return 0.5 * (out + out.adjoint());
}

// --- builtins ---------------------------------------------------------------

std::vector<std::string> builtin_families() {
  return {"dephasing",  "amplitude-damping", "depolarizing", "rotation", "dephasing2",
          "rotation2",  "damped-rotation",   "example1",     "example2", "custom-spectral"};
}

ParametricChannel builtin(std::string_view family, const FamilyOptions& options) {
  if (family == "dephasing") return dephasing();
  if (family == "amplitude-damping") return amplitude_damping();
  if (family == "depolarizing") return depolarizing();
  if (family == "rotation") return rotation(options.axis);
  if (family == "dephasing2") return dephasing2();
  if (family == "rotation2") return rotation2();
  if (family == "damped-rotation") return damped_rotation();
  if (family == "example1") return example1();
  if (family == "example2") return example2(options.f, options.g);
  if (family == "custom-spectral") {
    if (!options.custom) throw ValidationError("custom-spectral needs spectral data");
    return custom_spectral(*options.custom);
  }
  throw ValidationError("unknown channel family '" + std::string(family) + "'");
}

// --- ProductExponential / remix ---------------------------------------------

ProductExponential::ProductExponential(ComplexMatrix base, std::vector<ComplexMatrix> generators)
    : base_(std::move(base)), generators_(std::move(generators)) {
  for (const auto& g : generators_) {
    if (g.rows() != base_.rows() || g.cols() != base_.rows())
      throw ValidationError("generator dimension does not match the base unitary");
    if (linalg::hermiticity_defect(g) > 1e-10) throw ValidationError("generator is not Hermitian");
  }
}

ComplexMatrix ProductExponential::value(const ParamPoint& theta) const {
  ComplexMatrix out = base_;
  for (std::size_t l = 0; l < generators_.size(); ++l) out = linalg::unitary_exp(generators_[l], theta[l]) * out;
  return out;
}

ComplexMatrix ProductExponential::partial(const ParamPoint& theta, int param) const {
  require_param(param, params());
  ComplexMatrix out = base_;
  for (std::size_t l = 0; l < generators_.size(); ++l) {
    out = linalg::unitary_exp(generators_[l], theta[l]) * out;
    if (static_cast<int>(l) == param) out = (-kI) * generators_[l] * out;
  }
  return out;
}

ParametricChannel remix(const ParametricChannel& ch, const ProductExponential& mixing) {
  if (ch.form() != ChannelForm::KrausCurve) throw ValidationError("remix needs a Kraus curve");
  if (mixing.params() != 0 && mixing.params() != ch.param_count())
    throw ValidationError("remix: mixing unitary must have zero or one generator per parameter");
  const ParamPoint zero(static_cast<std::size_t>(ch.param_count()), 0.0);
  auto mix_at = [mixing, zero](const ParamPoint& t) {
    return mixing.params() == 0 ? mixing.value(zero) : mixing.value(t);
  };
  auto kraus = [ch, mix_at](const ParamPoint& t) {
    const auto ops = ch.raw_kraus(t);
    const ComplexMatrix u = mix_at(t);
    if (static_cast<std::size_t>(u.rows()) != ops.size())
      throw ValidationError("remix: mixing unitary size does not match the Kraus count");
    std::vector<ComplexMatrix> out;
    for (std::size_t j = 0; j < ops.size(); ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(ops[j].rows(), ops[j].cols());
      for (std::size_t k = 0; k < ops.size(); ++k) e += u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * ops[k];
      out.push_back(std::move(e));
    }
    return out;
  };
  ParametricChannel::KrausDerivativeFn deriv;
  if (ch.has_analytic_derivative()) {
    deriv = [ch, mixing, mix_at](const ParamPoint& t, int l) {
      const auto ops = ch.raw_kraus(t);
      const auto dops = ch.analytic_kraus_derivative(t, l);
      const ComplexMatrix u = mix_at(t);
      const ComplexMatrix du = mixing.params() == 0 ? ComplexMatrix::Zero(u.rows(), u.cols()) : mixing.partial(t, l);
      std::vector<ComplexMatrix> out;
      for (std::size_t j = 0; j < ops.size(); ++j) {
        ComplexMatrix e = ComplexMatrix::Zero(ops[j].rows(), ops[j].cols());
        for (std::size_t k = 0; k < ops.size(); ++k) {
          const auto jj = static_cast<Eigen::Index>(j);
          const auto kk = static_cast<Eigen::Index>(k);
          e += du(jj, kk) * ops[k] + u(jj, kk) * dops[k];
        }
        out.push_back(std::move(e));
      }
      return out;
    };
  }
  std::optional<PureState> input;
  if (ch.has_input()) input = ch.input_state();
  return ParametricChannel::kraus_curve(ch.name() + "/remixed", ch.dim(), ch.domain(), kraus, deriv, input);
}

}  // namespace qfi
