#include "qfi/multi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfi/errors.hpp"

namespace qfi::bounds {

namespace {

constexpr double kSharedTol = 1e-9;

std::vector<double> axis(int m, int l) {
  std::vector<double> v(static_cast<std::size_t>(m), 0.0);
  v[static_cast<std::size_t>(l)] = 1.0;
  return v;
}

RealMatrix symmetrized(const RealMatrix& a) { return 0.5 * (a + a.transpose()); }

double quadratic(const RealMatrix& a, const std::vector<double>& v) {
  const Eigen::Map<const RealVector> x(v.data(), static_cast<Eigen::Index>(v.size()));
  return x.dot(a * x);
}

double relative(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

std::vector<CanonicalKraus> per_parameter_canonical(const ParametricChannel& ch, const ParamPoint& theta,
                                                    const linalg::DiffConfig& cfg) {
  std::vector<CanonicalKraus> out;
  for (int l = 0; l < ch.param_count(); ++l) {
    out.push_back(canonical_kraus(ch, theta, axis(ch.param_count(), l), cfg));
    if (linalg::max_abs(out.back().mixing - out.front().mixing) > kSharedTol)
      throw DegeneracyError(
          "degenerate Gram eigenvalues split differently along each parameter; no common canonical basis");
  }
  return out;
}

}  // namespace

const char* to_string(InfoKind k) {
  switch (k) {
    case InfoKind::Fisher: return "fisher";
    case InfoKind::Sld: return "sld";
    case InfoKind::Sm: return "sm";
  }
  return "unknown";
}

void MultiSpectralCurve::validate() const {
  if (slices.empty()) throw NumericError("multi-parameter curve has no slices");
  for (const auto& s : slices) {
    s.validate();
    if (linalg::max_abs(s.p - slices.front().p) > kSharedTol || linalg::max_abs(s.w - slices.front().w) > kSharedTol)
      throw NumericError("parameter slices disagree on the eigenbasis at theta");
  }
}

MultiSpectralCurve multi_spectral_curve(const ParametricChannel& ch, const ParamPoint& theta,
                                        const linalg::DiffConfig& cfg) {
  MultiSpectralCurve msc;
  msc.theta = theta;
  if (ch.form() == ChannelForm::KrausCurve) {
    for (const auto& canon : per_parameter_canonical(ch, theta, cfg))
      msc.slices.push_back(curve_from_canonical(canon, ch.input_state(), theta));
  } else {
    for (int l = 0; l < ch.param_count(); ++l)
      msc.slices.push_back(spectral_curve(ch, theta, axis(ch.param_count(), l), cfg));
  }
  msc.validate();
  return msc;
}

InfoMatrix fisher_matrix(const ParametricChannel& ch, const POVM& povm, const ParamPoint& theta,
                         const linalg::DiffConfig& cfg) {
  const int m = ch.param_count();
  std::vector<FisherResult> parts;
  for (int l = 0; l < m; ++l) parts.push_back(fisher_information(ch, povm, theta, axis(m, l), cfg));
  InfoMatrix out;
  out.kind = InfoKind::Fisher;
  out.entries = RealMatrix::Zero(m, m);
  out.dropped_terms = parts.front().dropped_terms;
  for (std::size_t o = 0; o < povm.size(); ++o) {
    const double p = parts.front().probabilities[o];
    if (p <= kFisherFloor) {
      for (const auto& part : parts)
        if (std::abs(part.slopes[o]) > kFisherSlopeFloor) out.singular = true;
      continue;
    }
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        out.entries(j, k) += parts[static_cast<std::size_t>(j)].slopes[o] * parts[static_cast<std::size_t>(k)].slopes[o] / p;
  }
  out.entries = symmetrized(out.entries);
  return out;
}

InfoMatrix sld_matrix(const MultiSpectralCurve& msc) {
  const int m = msc.params();
  std::vector<ComplexMatrix> scores;
  for (const auto& s : msc.slices) scores.push_back(sld_score(s));
  const ComplexMatrix rho = msc.slices.front().rho();
  InfoMatrix out;
  out.kind = InfoKind::Sld;
  out.entries = RealMatrix::Zero(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      out.entries(j, k) =
          (scores[static_cast<std::size_t>(j)] * rho * scores[static_cast<std::size_t>(k)]).trace().real();
  out.entries = symmetrized(out.entries);
  return out;
}

InfoMatrix sm_matrix(const MultiSpectralCurve& msc) {
  const int m = msc.params();
  const SpectralCurve& base = msc.slices.front();
  InfoMatrix out;
  out.kind = InfoKind::Sm;
  out.entries = RealMatrix::Zero(m, m);
  for (int a = 0; a < base.dim(); ++a) {
    if (!base.support[static_cast<std::size_t>(a)]) continue;
    for (int j = 0; j < m; ++j) {
      const SpectralCurve& sj = msc.slices[static_cast<std::size_t>(j)];
      for (int k = 0; k < m; ++k) {
        const SpectralCurve& sk = msc.slices[static_cast<std::size_t>(k)];
        out.entries(j, k) += sj.dp[a] * sk.dp[a] / base.p[a] + 4.0 * base.p[a] * sk.dw.col(a).dot(sj.dw.col(a)).real();
      }
    }
  }
  out.entries = symmetrized(out.entries);
  return out;
}

InfoMatrix sm_matrix(const ParametricChannel& ch, const ParamPoint& theta, const linalg::DiffConfig& cfg) {
  if (ch.form() == ChannelForm::SpectralForm) return sm_matrix(multi_spectral_curve(ch, theta, cfg));
  const int m = ch.param_count();
  const auto canon = per_parameter_canonical(ch, theta, cfg);
  const ComplexVector& psi = ch.input_state().amplitudes();
  std::vector<std::vector<ComplexVector>> images(static_cast<std::size_t>(m));
  for (int l = 0; l < m; ++l)
    for (const auto& d : canon[static_cast<std::size_t>(l)].derivative) images[static_cast<std::size_t>(l)].push_back(d * psi);
  InfoMatrix out;
  out.kind = InfoKind::Sm;
  out.entries = RealMatrix::Zero(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      for (std::size_t a = 0; a < images.front().size(); ++a)
        out.entries(j, k) += 4.0 * images[static_cast<std::size_t>(k)][a].dot(images[static_cast<std::size_t>(j)][a]).real();
  out.entries = symmetrized(out.entries);
  return out;
}

MultiAttainability multi_attainability_check(const MultiSpectralCurve& msc, double tol) {
  MultiAttainability out;
  double moving = 0.0;
  int supported = 0;
  for (const auto& s : msc.slices) {
    out.residual = std::max(out.residual, attainability_check(s, tol).residual);
    for (int k = 0; k < s.dim(); ++k)
      if (s.support[static_cast<std::size_t>(k)]) moving = std::max(moving, s.dw.col(k).cwiseAbs().maxCoeff());
  }
  for (bool b : msc.slices.front().support) supported += b ? 1 : 0;
  out.attainable = out.residual < tol;
  out.quasi_classical = moving < tol;
  out.unitary = supported == 1;
  return out;
}

bool LoewnerReport::all_hold() const {
  return sld_le_sm.holds && (!fisher_le_sld || fisher_le_sld->holds) && (!fisher_le_sm || fisher_le_sm->holds);
}

LoewnerReport loewner_report(const std::optional<InfoMatrix>& fisher, const InfoMatrix& sld, const InfoMatrix& sm) {
  if (sld.entries.rows() != sm.entries.rows() || (fisher && fisher->entries.rows() != sm.entries.rows()))
    throw ValidationError("loewner_report: information matrices have different sizes");
  LoewnerReport out;
  out.tol = 1e-8 * (1.0 + linalg::max_abs(sm.entries));
  out.sld_le_sm = linalg::loewner_leq(sld.entries, sm.entries, out.tol);
  if (fisher) {
    out.fisher_le_sld = linalg::loewner_leq(fisher->entries, sld.entries, out.tol);
    out.fisher_le_sm = linalg::loewner_leq(fisher->entries, sm.entries, out.tol);
  }
  return out;
}

DirectionalReport directional_reduction_check(const ParametricChannel& ch, const ParamPoint& theta,
                                              const std::vector<double>& direction, const linalg::DiffConfig& cfg,
                                              double tol) {
  const ParametricChannel line = ch.slice(theta, direction);
  DirectionalReport out;
  out.direction = direction;

  const MultiSpectralCurve msc = multi_spectral_curve(ch, theta, cfg);
  const RealMatrix h = sld_matrix(msc).entries;
  out.sld_quadratic = quadratic(h, direction);

  if (ch.form() == ChannelForm::KrausCurve) {
    const auto parts = per_parameter_canonical(ch, theta, cfg);
    const CanonicalKraus along = canonical_kraus(line, 0.0, cfg);
    if (linalg::max_abs(along.mixing - parts.front().mixing) > kSharedTol)
      throw DegeneracyError("slice and parameter axes pick different canonical bases at theta");
    double diff = 0.0;
    double scale = 1.0;
    for (std::size_t k = 0; k < along.derivative.size(); ++k) {
      ComplexMatrix combined = ComplexMatrix::Zero(along.derivative[k].rows(), along.derivative[k].cols());
      for (std::size_t l = 0; l < parts.size(); ++l) combined += direction[l] * parts[l].derivative[k];
      diff = std::max(diff, linalg::max_abs(along.derivative[k] - combined));
      scale = std::max(scale, linalg::max_abs(combined));
    }
    out.kraus_residual = diff / scale;
    const SpectralCurve sc = curve_from_canonical(along, line.input_state(), ParamPoint{0.0});
    sc.validate();
    out.sld_slice = sld_information(sc);
    out.sm_slice = sm_bound_kraus(along.ops, along.derivative, DensityMatrix(line.input_state()));
    out.sm_quadratic = quadratic(sm_matrix(ch, theta, cfg).entries, direction);
  } else {
    const SpectralCurve sc = spectral_curve(line, 0.0, cfg);
    out.sld_slice = sld_information(sc);
    out.sm_slice = sm_bound_spectral(sc);
    out.sm_quadratic = quadratic(sm_matrix(msc).entries, direction);
  }
  out.max_relative_error =
      std::max({relative(out.sld_slice, out.sld_quadratic), relative(out.sm_slice, out.sm_quadratic),
                out.kraus_residual.value_or(0.0)});
  out.passed = out.max_relative_error < tol;
  return out;
}

CramerRaoFloor cramer_rao_floor(const InfoMatrix& info, double shots) {
  if (!(shots > 0.0)) throw ValidationError("cramer_rao_floor: shot count must be positive");
  const linalg::PseudoInverse pinv = linalg::symmetric_pinv(info.entries);
  return {pinv.matrix / shots, pinv.rank, pinv.rank == info.entries.rows()};
}

MatrixReport multi_parameter_report(const ParametricChannel& ch, const ParamPoint& theta, const PovmChoice& povm,
                                    const linalg::DiffConfig& cfg, double tol) {
  MatrixReport r;
  r.theta = theta;
  const MultiSpectralCurve msc = multi_spectral_curve(ch, theta, cfg);
  r.gauge_source = msc.slices.front().gauge_source;
  r.sld = sld_matrix(msc);
  r.sm = ch.form() == ChannelForm::KrausCurve ? sm_matrix(ch, theta, cfg) : sm_matrix(msc);
  r.attainability = multi_attainability_check(msc, tol);
  if (povm.kind == PovmChoice::Kind::SldOptimal)
    r.warnings.push_back("no single SLD-optimal POVM exists for several parameters; Fisher matrix omitted");
  if (povm.kind == PovmChoice::Kind::Fixed && povm.povm) {
    r.fisher = fisher_matrix(ch, *povm.povm, theta, cfg);
    if (r.fisher->singular) r.warnings.push_back("Fisher matrix singular: an outcome with p_m = 0 has nonzero slope");
    if (r.fisher->dropped_terms > 0) r.warnings.push_back("Fisher terms with p_m <= 1e-12 dropped");
  }
  r.loewner = loewner_report(r.fisher, r.sld, r.sm);
  r.sld_floor = cramer_rao_floor(r.sld, 1.0);
  if (!r.sld_floor.full_rank) {
    std::ostringstream msg;
    msg << "SLD matrix has rank " << r.sld_floor.rank << " < " << ch.param_count()
        << "; Cramer-Rao floor uses the pseudo-inverse";
    r.warnings.push_back(msg.str());
  }
  if (ch.form() == ChannelForm::KrausCurve)
    r.warnings.push_back(
        "gauge: canonical Kraus phases fixed by maximal-overlap alignment per parameter; C_upsilon depends on "
        "this phase convention");
  for (const auto& s : msc.slices)
    if (s.degeneracy_resolved) {
      r.warnings.push_back("degenerate eigenvalues at theta; eigenvectors chosen by first-order splitting");
      break;
    }
  if (!r.attainability.attainable)
    r.warnings.push_back("SM matrix bound not attainable here (H != C_upsilon)");
  return r;
}

}  // namespace qfi::bounds
