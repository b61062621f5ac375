#include "qfi/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfi/errors.hpp"

namespace qfi::bounds {

namespace {

constexpr double kDiagonalityTol = 1e-8;
// Minimum overlap between a centre eigenvector and its stencil partner.
constexpr double kContinuityTol = 0.9;
constexpr double kCurveSumTol = 1e-9;
constexpr double kCurveDerivTol = 1e-6;

struct Descending {
  RealVector values;
  ComplexMatrix vectors;
};

Descending descending_eig(const ComplexMatrix& a) {
  const linalg::EigenSystem es = linalg::hermitian_eigendecompose(0.5 * (a + a.adjoint()));
  const Eigen::Index n = es.values.size();
  Descending out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = es.values[n - 1 - k];
    out.vectors.col(k) = es.vectors.col(n - 1 - k);
  }
  return out;
}

// G(i, j) = <E_i psi | E_j psi>
ComplexMatrix gram(const std::vector<ComplexMatrix>& ops, const ComplexVector& psi) {
  ComplexMatrix images(psi.size(), static_cast<Eigen::Index>(ops.size()));
  for (std::size_t i = 0; i < ops.size(); ++i) images.col(static_cast<Eigen::Index>(i)) = ops[i] * psi;
  return images.adjoint() * images;
}

ParamPoint shifted(const ParamPoint& theta, const std::vector<double>& direction, double t) {
  ParamPoint out = theta;
  for (std::size_t l = 0; l < out.size(); ++l) out[l] += t * direction[l];
  return out;
}

std::vector<ComplexMatrix> mix(const std::vector<ComplexMatrix>& ops, const ComplexMatrix& mixing) {
  std::vector<ComplexMatrix> out;
  out.reserve(ops.size());
  for (Eigen::Index k = 0; k < mixing.cols(); ++k) {
    ComplexMatrix acc = ComplexMatrix::Zero(ops.front().rows(), ops.front().cols());
    for (Eigen::Index i = 0; i < mixing.rows(); ++i) acc += mixing(i, k) * ops[static_cast<std::size_t>(i)];
    out.push_back(std::move(acc));
  }
  return out;
}

void require_stencil_in_domain(const ParametricChannel& ch, const ParamPoint& theta,
                               const std::vector<double>& direction, const linalg::Stencil& st) {
  if (!ch.domain().contains(theta)) throw ValidationError("parameter outside the channel domain");
  for (double o : st.offsets)
    if (!ch.domain().contains(shifted(theta, direction, o)))
      throw ValidationError("finite-difference stencil leaves the channel domain");
}

// Splits degenerate supported clusters of the centre eigenbasis using the
// first-order term C^dagger G' C restricted to each cluster.
bool resolve_clusters(Descending& centre, const ComplexMatrix& gram_derivative) {
  const Eigen::Index n = centre.values.size();
  bool resolved = false;
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && centre.values[stop - 1] - centre.values[stop] < linalg::kClusterTol) ++stop;
    const Eigen::Index size = stop - start;
    if (size > 1 && centre.values[start] > kSupportTol) {
      const ComplexMatrix basis = centre.vectors.middleCols(start, size);
      const ComplexMatrix split = basis.adjoint() * gram_derivative * basis;
      const Descending sub = descending_eig(split);
      const double scale = std::max(1.0, linalg::max_abs(split));
      for (Eigen::Index k = 1; k < size; ++k) {
        if (sub.values[k - 1] - sub.values[k] < 1e-6 * scale) {
          std::ostringstream msg;
          msg << "degenerate eigenvalue " << centre.values[start]
              << " (multiplicity " << size << ") is not split to first order; perturb theta";
          throw DegeneracyError(msg.str());
        }
      }
      ComplexMatrix rotated = basis * sub.vectors;
      for (Eigen::Index k = 0; k < size; ++k) linalg::normalize_phase(rotated.col(k));
      centre.vectors.middleCols(start, size) = rotated;
      resolved = true;
    }
    start = stop;
  }
  return resolved;
}

// Aligns a stencil eigenbasis with the centre basis.
ComplexMatrix align(const ComplexMatrix& centre, const std::vector<Eigen::Index>& supported,
                    const std::vector<Eigen::Index>& null_cols, const ComplexMatrix& stencil) {
  const Eigen::Index n = centre.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::vector<bool> done(supported.size(), false);
  const ComplexMatrix overlaps = centre.adjoint() * stencil;

  for (std::size_t round = 0; round < supported.size(); ++round) {
    double best = -1.0;
    std::size_t best_a = 0;
    Eigen::Index best_b = 0;
    for (std::size_t a = 0; a < supported.size(); ++a) {
      if (done[a]) continue;
      for (Eigen::Index b = 0; b < n; ++b) {
        if (used[static_cast<std::size_t>(b)]) continue;
        const double ov = std::abs(overlaps(supported[a], b));
        if (ov > best) {
          best = ov;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best < kContinuityTol) {
      std::ostringstream msg;
      msg << "Gram eigenvalue crossing inside the finite-difference stencil (overlap " << best << ")";
      throw DegeneracyError(msg.str());
    }
    const Complex ov = overlaps(supported[best_a], best_b);
    out.col(supported[best_a]) = stencil.col(best_b) * (std::conj(ov) / std::abs(ov));
    done[best_a] = true;
    used[static_cast<std::size_t>(best_b)] = true;
  }

  if (!null_cols.empty()) {
    const auto k = static_cast<Eigen::Index>(null_cols.size());
    ComplexMatrix centre_null(n, k);
    ComplexMatrix stencil_null(n, k);
    Eigen::Index c = 0;
    for (Eigen::Index col : null_cols) centre_null.col(c++) = centre.col(col);
    c = 0;
    for (Eigen::Index b = 0; b < n; ++b)
      if (!used[static_cast<std::size_t>(b)]) stencil_null.col(c++) = stencil.col(b);
    // closest unitary rotation of the stencil block onto the centre block
    const ComplexMatrix o = centre_null.adjoint() * stencil_null;
    Eigen::JacobiSVD<ComplexMatrix> svd(o, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().minCoeff() < 0.5)
      throw DegeneracyError("null space of the Gram matrix rotates too fast inside the stencil");
    const ComplexMatrix aligned = stencil_null * svd.matrixV() * svd.matrixU().adjoint();
    c = 0;
    for (Eigen::Index col : null_cols) out.col(col) = aligned.col(c++);
  }
  return out;
}

}  // namespace

const char* to_string(GaugeSource g) {
  return g == GaugeSource::CanonicalKraus ? "canonical-kraus" : "spectral-form";
}

// --- canonical Kraus --------------------------------------------------------

CanonicalKraus canonical_kraus(const ParametricChannel& ch, const ParamPoint& theta,
                               const std::vector<double>& direction, const linalg::DiffConfig& cfg) {
  if (ch.form() != ChannelForm::KrausCurve)
    throw ValidationError("canonical Kraus operators need a Kraus curve; '" + ch.name() + "' is spectral");
  if (static_cast<int>(direction.size()) != ch.param_count())
    throw ValidationError("direction must have one entry per parameter");
  const ComplexVector& psi = ch.input_state().amplitudes();
  const linalg::Stencil st = linalg::make_stencil(cfg);
  require_stencil_in_domain(ch, theta, direction, st);

  const std::vector<ComplexMatrix> ops = ch.raw_kraus(theta);
  Descending centre = descending_eig(gram(ops, psi));
  const auto n = static_cast<Eigen::Index>(ops.size());

  std::vector<std::vector<ComplexMatrix>> stencil_ops;
  std::vector<Descending> stencil_eig;
  for (double o : st.offsets) {
    stencil_ops.push_back(ch.raw_kraus(shifted(theta, direction, o)));
    if (static_cast<Eigen::Index>(stencil_ops.back().size()) != n)
      throw NumericError("Kraus element count changes inside the stencil");
  }

  CanonicalKraus out;
  {
    ComplexMatrix gram_derivative = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < st.offsets.size(); ++i) gram_derivative += st.weights[i] * gram(stencil_ops[i], psi);
    out.degeneracy_resolved = resolve_clusters(centre, gram_derivative);
  }

  std::vector<Eigen::Index> supported;
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index k = 0; k < n; ++k) (centre.values[k] > kSupportTol ? supported : null_cols).push_back(k);

  out.mixing = centre.vectors;
  out.ops = mix(ops, out.mixing);
  const ComplexMatrix diag = out.mixing.adjoint() * gram(ops, psi) * out.mixing;
  out.weights = diag.diagonal().real();
  ComplexMatrix off = diag;
  off.diagonal().setZero();
  out.diagonality_residual = linalg::max_abs(off);
  if (out.diagonality_residual > kDiagonalityTol) {
    std::ostringstream msg;
    msg << "canonical Kraus construction left off-diagonal Gram entries of " << out.diagonality_residual;
    throw NumericError(msg.str());
  }

  out.derivative.assign(ops.size(), ComplexMatrix::Zero(ops.front().rows(), ops.front().cols()));
  for (std::size_t i = 0; i < st.offsets.size(); ++i) {
    const Descending local = descending_eig(gram(stencil_ops[i], psi));
    const ComplexMatrix aligned = align(centre.vectors, supported, null_cols, local.vectors);
    const auto mixed = mix(stencil_ops[i], aligned);
    for (std::size_t k = 0; k < mixed.size(); ++k) out.derivative[k] += st.weights[i] * mixed[k];
  }
  return out;
}

CanonicalKraus canonical_kraus(const ParametricChannel& ch, double theta, const linalg::DiffConfig& cfg) {
  return canonical_kraus(ch, ParamPoint{theta}, std::vector<double>{1.0}, cfg);
}

// --- spectral curves --------------------------------------------------------

Complex SpectralCurve::overlap(int j, int k) const {
  const auto sj = static_cast<std::size_t>(j);
  const auto sk = static_cast<std::size_t>(k);
  if (support[sj]) return dw.col(j).dot(w.col(k));
  if (support[sk]) return -w.col(j).dot(dw.col(k));
  return 0.0;
}

ComplexMatrix SpectralCurve::rho() const {
  ComplexMatrix out = w * p.cast<Complex>().asDiagonal() * w.adjoint();
  return 0.5 * (out + out.adjoint());
}

ComplexMatrix SpectralCurve::rho_derivative() const {
  const int d = dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const ComplexVector wk = w.col(k);
    const ComplexVector dwk = dw.col(k);
    out += dp[k] * wk * wk.adjoint() + p[k] * (dwk * wk.adjoint() + wk * dwk.adjoint());
  }
  return 0.5 * (out + out.adjoint());
}

void SpectralCurve::validate() const {
  const int d = dim();
  const double scale = std::max({1.0, dp.size() ? dp.cwiseAbs().maxCoeff() : 0.0, linalg::max_abs(dw)});
  std::ostringstream msg;
  const double sum = std::abs(p.sum() - 1.0);
  const double dsum = std::abs(dp.sum());
  const double ortho = linalg::max_abs(w.adjoint() * w - ComplexMatrix::Identity(d, d));
  const ComplexMatrix a = dw.adjoint() * w;
  const double anti = linalg::max_abs(a + a.adjoint());
  if (sum > kCurveSumTol) {
    msg << "spectral curve eigenvalues sum to 1 + " << p.sum() - 1.0;
  } else if (dsum > kCurveDerivTol * scale) {
    msg << "spectral curve eigenvalue derivatives sum to " << dp.sum();
  } else if (ortho > kCurveSumTol) {
    msg << "spectral curve eigenvectors are not orthonormal (defect " << ortho << ")";
  } else if (anti > kCurveDerivTol * scale) {
    msg << "spectral curve violates <w_j'|w_k> = -<w_j|w_k'> (defect " << anti << ")";
  } else {
    return;
  }
  throw NumericError(msg.str());
}

SpectralCurve curve_from_canonical(const CanonicalKraus& canon, const PureState& input, const ParamPoint& theta) {
  const ComplexVector& psi = input.amplitudes();
  const auto d = static_cast<Eigen::Index>(psi.size());
  std::vector<ComplexVector> w_cols;
  std::vector<ComplexVector> dw_cols;
  std::vector<double> p_vals;
  std::vector<double> dp_vals;
  for (std::size_t k = 0; k < canon.ops.size(); ++k) {
    const ComplexVector v = canon.ops[k] * psi;
    const ComplexVector dv = canon.derivative[k] * psi;
    const double pk = v.squaredNorm();
    if (pk <= kSupportTol) continue;
    const double root = std::sqrt(pk);
    const ComplexVector wk = v / root;
    const double dpk = 2.0 * v.dot(dv).real();
    w_cols.push_back(wk);
    p_vals.push_back(pk);
    dp_vals.push_back(dpk);
    dw_cols.push_back((dv - (dpk / (2.0 * root)) * wk) / root);
  }
  const auto r = static_cast<Eigen::Index>(w_cols.size());
  if (r > d) throw NumericError("more supported canonical operators than the output dimension");

  SpectralCurve sc;
  sc.theta = theta;
  sc.gauge_source = GaugeSource::CanonicalKraus;
  sc.degeneracy_resolved = canon.degeneracy_resolved;
  sc.p = RealVector::Zero(d);
  sc.dp = RealVector::Zero(d);
  sc.w = ComplexMatrix::Zero(d, d);
  sc.dw = ComplexMatrix::Zero(d, d);
  sc.support.assign(static_cast<std::size_t>(d), false);
  for (Eigen::Index k = 0; k < r; ++k) {
    const auto sk = static_cast<std::size_t>(k);
    sc.p[k] = p_vals[sk];
    sc.dp[k] = dp_vals[sk];
    sc.w.col(k) = w_cols[sk];
    sc.dw.col(k) = dw_cols[sk];
    sc.support[sk] = true;
  }
  if (r < d) {
    const ComplexMatrix ws = sc.w.leftCols(r);
    const ComplexMatrix complement = ComplexMatrix::Identity(d, d) - ws * ws.adjoint();
    const linalg::EigenSystem es = linalg::hermitian_eigendecompose(0.5 * (complement + complement.adjoint()));
    for (Eigen::Index j = 0; j < d - r; ++j) sc.w.col(r + j) = es.vectors.col(r + j);
    // components along the support follow from <w_k|w_j'> = -<w_k'|w_j>;
    // components inside the null space are never used and set to zero
    for (Eigen::Index j = r; j < d; ++j) {
      ComplexVector dwj = ComplexVector::Zero(d);
      for (Eigen::Index k = 0; k < r; ++k) dwj -= sc.dw.col(k).dot(sc.w.col(j)) * sc.w.col(k);
      sc.dw.col(j) = dwj;
    }
  }
  return sc;
}

SpectralCurve spectral_curve(const ParametricChannel& ch, const ParamPoint& theta,
                             const std::vector<double>& direction, const linalg::DiffConfig& cfg) {
  if (static_cast<int>(direction.size()) != ch.param_count())
    throw ValidationError("direction must have one entry per parameter");
  SpectralCurve sc;
  if (ch.form() == ChannelForm::KrausCurve) {
    sc = curve_from_canonical(canonical_kraus(ch, theta, direction, cfg), ch.input_state(), theta);
  } else {
    if (!ch.domain().contains(theta)) throw ValidationError("parameter outside the channel domain");
    const SpectralData s = ch.spectral_at(theta);
    const int d = ch.dim();
    sc.theta = theta;
    sc.gauge_source = GaugeSource::SpectralForm;
    sc.p = s.p;
    sc.w = s.w;
    sc.dp = RealVector::Zero(d);
    sc.dw = ComplexMatrix::Zero(d, d);
    for (std::size_t l = 0; l < direction.size(); ++l) {
      sc.dp += direction[l] * s.dp[l];
      sc.dw += direction[l] * s.dw[l];
    }
    sc.support.assign(static_cast<std::size_t>(d), false);
    for (int k = 0; k < d; ++k) sc.support[static_cast<std::size_t>(k)] = sc.p[k] > kSupportTol;
  }
  sc.validate();
  return sc;
}

SpectralCurve spectral_curve(const ParametricChannel& ch, double theta, const linalg::DiffConfig& cfg) {
  return spectral_curve(ch, ParamPoint{theta}, std::vector<double>{1.0}, cfg);
}

// --- SLD and bounds ---------------------------------------------------------

ComplexMatrix sld_score(const SpectralCurve& sc) {
  const int d = sc.dim();
  ComplexMatrix l = ComplexMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    if (sc.support[static_cast<std::size_t>(j)]) l(j, j) = sc.dp[j] / sc.p[j];
    for (int k = j + 1; k < d; ++k) {
      const double total = sc.p[j] + sc.p[k];
      if (!(sc.support[static_cast<std::size_t>(j)] || sc.support[static_cast<std::size_t>(k)])) continue;
      const Complex entry = 2.0 * (sc.p[j] - sc.p[k]) / total * sc.overlap(j, k);
      l(j, k) = entry;
      l(k, j) = std::conj(entry);
    }
  }
  ComplexMatrix sld = sc.w * l * sc.w.adjoint();
  sld = 0.5 * (sld + sld.adjoint());

  const ComplexMatrix rho = sc.rho();
  const ComplexMatrix drho = sc.rho_derivative();
  const double residual = linalg::max_abs(drho - 0.5 * (rho * sld + sld * rho));
  if (residual > 1e-6 * std::max(1.0, linalg::max_abs(drho))) {
    std::ostringstream msg;
    msg << "SLD does not reproduce the state derivative (residual " << residual << "); inconsistent curve data";
    throw NumericError(msg.str());
  }
  return sld;
}

double sld_information(const SpectralCurve& sc) {
  const int d = sc.dim();
  double h = 0.0;
  for (int k = 0; k < d; ++k)
    if (sc.support[static_cast<std::size_t>(k)]) h += sc.dp[k] * sc.dp[k] / sc.p[k];
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      const double total = sc.p[j] + sc.p[k];
      if (!(sc.support[static_cast<std::size_t>(j)] || sc.support[static_cast<std::size_t>(k)])) continue;
      const double diff = sc.p[j] - sc.p[k];
      h += 4.0 * diff * diff / total * std::norm(sc.overlap(j, k));
    }
  }
  const ComplexMatrix sld = sld_score(sc);
  const double trace_form = (sc.rho() * sld * sld).trace().real();
  if (std::abs(trace_form - h) > 1e-8 * std::max(1.0, h)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "SLD information mismatch: spectral sum " << h << " vs tr{rho L^2} " << trace_form;
    throw NumericError(msg.str());
  }
  return h;
}

double sm_bound_spectral(const SpectralCurve& sc) {
  const int d = sc.dim();
  double c = 0.0;
  for (int k = 0; k < d; ++k) {
    if (!sc.support[static_cast<std::size_t>(k)]) continue;
    c += sc.dp[k] * sc.dp[k] / sc.p[k];
    c += 4.0 * sc.p[k] * std::norm(sc.overlap(k, k));
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      if (!(sc.support[static_cast<std::size_t>(j)] || sc.support[static_cast<std::size_t>(k)])) continue;
      c += 4.0 * (sc.p[j] + sc.p[k]) * std::norm(sc.overlap(j, k));
    }
  }
  return c;
}

double sm_bound_kraus(const std::vector<ComplexMatrix>& ops, const std::vector<ComplexMatrix>& derivative,
                      const DensityMatrix& rho0) {
  if (ops.size() != derivative.size()) throw ValidationError("sm_bound_kraus: operator and derivative counts differ");
  double c = 0.0;
  for (const auto& de : derivative) {
    if (de.rows() != rho0.dim() || de.cols() != rho0.dim()) throw ValidationError("sm_bound_kraus: dimension mismatch");
    c += (de * rho0.matrix() * de.adjoint()).trace().real();
  }
  return std::max(0.0, 4.0 * c);
}

double gap_formula(const SpectralCurve& sc) {
  const int d = sc.dim();
  double gap = 0.0;
  for (int j = 0; j < d; ++j) {
    if (!sc.support[static_cast<std::size_t>(j)]) continue;
    for (int k = 0; k < d; ++k) {
      if (!sc.support[static_cast<std::size_t>(k)]) continue;
      gap += 8.0 * sc.p[j] * sc.p[k] / (sc.p[j] + sc.p[k]) * std::norm(sc.overlap(j, k));
    }
  }
  return gap;
}

double bound_gap(const SpectralCurve& sc) {
  const double gap = gap_formula(sc);
  const double c = sm_bound_spectral(sc);
  const double h = sld_information(sc);
  if (std::abs(gap - (c - h)) > 1e-8 * std::max(1.0, c)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "gap identity failed: 8-sum " << gap << " vs C - H = " << c - h;
    throw NumericError(msg.str());
  }
  return gap;
}

Attainability attainability_check(const SpectralCurve& sc, double tol) {
  double residual = 0.0;
  for (int j = 0; j < sc.dim(); ++j) {
    if (!sc.support[static_cast<std::size_t>(j)]) continue;
    for (int k = 0; k < sc.dim(); ++k)
      if (sc.support[static_cast<std::size_t>(k)]) residual = std::max(residual, std::abs(sc.overlap(j, k)));
  }
  return {residual < tol, residual};
}

UnitaryCondition unitary_attainability(const ParametricChannel& ch, const ParamPoint& theta, double tol,
                                       const linalg::DiffConfig& cfg) {
  if (ch.param_count() != 1) throw ValidationError("unitary_attainability expects a one-parameter channel");
  const auto ops = ch.raw_kraus(theta);
  if (ops.size() != 1) throw ValidationError("unitary condition needs a single Kraus operator");
  const auto dops = kraus_derivative(ch, theta, 0, cfg);
  const ComplexVector& psi = ch.input_state().amplitudes();
  // tr{U rho0 U'^dagger} = <U' psi | U psi>
  const Complex value = (dops[0] * psi).dot(ops[0] * psi);
  return {value, std::abs(value) < tol};
}

POVM optimal_povm_from_sld(const ComplexMatrix& sld) {
  const linalg::EigenSystem es = linalg::hermitian_eigendecompose(sld);
  const Eigen::Index d = es.values.size();
  const double tol = linalg::kClusterTol * std::max(1.0, es.values.cwiseAbs().maxCoeff());
  std::vector<ComplexMatrix> elements;
  Eigen::Index start = 0;
  while (start < d) {
    Eigen::Index stop = start + 1;
    while (stop < d && es.values[stop] - es.values[stop - 1] < tol) ++stop;
    const ComplexMatrix block = es.vectors.middleCols(start, stop - start);
    ComplexMatrix proj = block * block.adjoint();
    elements.push_back(0.5 * (proj + proj.adjoint()));
    start = stop;
  }
  return POVM(std::move(elements));
}

FisherResult fisher_information(const ParametricChannel& ch, const POVM& povm, const ParamPoint& theta,
                                const std::vector<double>& direction, const linalg::DiffConfig& cfg) {
  if (!ch.domain().contains(theta)) throw ValidationError("parameter outside the channel domain");
  if (povm.dim() != ch.dim()) throw ValidationError("POVM dimension does not match the channel");
  const DensityMatrix rho(ch.output_matrix(theta));
  const ComplexMatrix drho = output_derivative(ch, theta, direction, cfg);
  FisherResult out;
  for (const auto& m : povm.elements()) {
    const double p = std::max(0.0, (rho.matrix() * m).trace().real());
    const double s = (drho * m).trace().real();
    out.probabilities.push_back(p);
    out.slopes.push_back(s);
    if (p <= kFisherFloor) {
      ++out.dropped_terms;
      if (std::abs(s) > kFisherSlopeFloor) out.singular = true;
      continue;
    }
    out.value += s * s / p;
  }
  return out;
}

FisherResult fisher_information(const ParametricChannel& ch, const POVM& povm, double theta,
                                const linalg::DiffConfig& cfg) {
  return fisher_information(ch, povm, ParamPoint{theta}, std::vector<double>{1.0}, cfg);
}

// --- POVM condition checks --------------------------------------------------

SldConditionReport povm_sld_condition_check(const POVM& povm, const ComplexMatrix& sld, const DensityMatrix& rho,
                                            double tol) {
  if (povm.dim() != rho.dim() || sld.rows() != rho.dim()) throw ValidationError("condition check: dimension mismatch");
  const ComplexMatrix root_rho = linalg::psd_sqrt(rho.matrix());
  SldConditionReport out;
  out.satisfied = true;
  for (const auto& m : povm.elements()) {
    const ComplexMatrix root_m = linalg::psd_sqrt(m);
    const ComplexMatrix a = root_m * sld * root_rho;
    const ComplexMatrix b = root_m * root_rho;
    ConditionElement el;
    const double bb = b.squaredNorm();
    if (std::sqrt(bb) < tol) {
      el.vacuous = true;
    } else {
      const Complex ba = (b.adjoint() * a).trace();
      el.xi = ba.real() / bb;
      el.residual = (a - el.xi * b).norm() + std::abs(ba.imag()) / bb;
    }
    out.max_residual = std::max(out.max_residual, el.residual);
    if (!(el.residual < tol)) out.satisfied = false;
    out.elements.push_back(el);
  }
  return out;
}

SmConditionReport povm_sm_condition_check(const POVM& povm, const std::vector<ComplexMatrix>& ops,
                                          const std::vector<ComplexMatrix>& derivative, const DensityMatrix& rho0,
                                          double tol) {
  if (ops.size() != derivative.size()) throw ValidationError("condition check: operator and derivative counts differ");
  if (!rho0.is_pure()) throw ValidationError("SM condition check needs a pure input state");
  const ComplexMatrix root_rho = linalg::psd_sqrt(rho0.matrix());
  SmConditionReport out;
  out.residuals = RealMatrix::Zero(static_cast<Eigen::Index>(povm.size()), static_cast<Eigen::Index>(ops.size()));
  out.satisfied = true;
  out.caveat =
      "this condition is satisfiable only when <w_j'|w_k> = 0 on the support; on other channels a failure "
      "says nothing about whether the POVM is Fisher-optimal";
  for (std::size_t m = 0; m < povm.size(); ++m) {
    const ComplexMatrix root_m = linalg::psd_sqrt(povm[m]);
    std::vector<ComplexMatrix> as;
    std::vector<ComplexMatrix> bs;
    Complex ba = 0.0;
    double bb = 0.0;
    for (std::size_t k = 0; k < ops.size(); ++k) {
      as.push_back(root_m * derivative[k] * root_rho);
      bs.push_back(root_m * ops[k] * root_rho);
      ba += (bs.back().adjoint() * as.back()).trace();
      bb += bs.back().squaredNorm();
    }
    double xi = 0.0;
    double penalty = 0.0;
    if (bb > tol * tol) {
      xi = ba.real() / bb;
      penalty = std::abs(ba.imag()) / bb;
    }
    out.xi.push_back(xi);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const double r = (as[k] - xi * bs[k]).norm() + penalty;
      out.residuals(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = r;
      out.max_residual = std::max(out.max_residual, r);
      if (!(r < tol)) out.satisfied = false;
    }
  }
  return out;
}

// --- report -----------------------------------------------------------------

BoundReport one_parameter_report(const ParametricChannel& ch, const ParamPoint& theta, const PovmChoice& choice,
                                 const linalg::DiffConfig& cfg, double tol) {
  if (ch.param_count() != 1) throw ValidationError("one-parameter report needs a one-parameter channel");
  const std::vector<double> dir{1.0};
  BoundReport r;
  r.theta = theta;

  SpectralCurve sc;
  std::optional<CanonicalKraus> canon;
  if (ch.form() == ChannelForm::KrausCurve) {
    canon = canonical_kraus(ch, theta, dir, cfg);
    sc = curve_from_canonical(*canon, ch.input_state(), theta);
    sc.validate();
    const DensityMatrix rho0(ch.input_state());
    r.sm = sm_bound_kraus(canon->ops, canon->derivative, rho0);
    r.method_cross_check = std::abs(sm_bound_spectral(sc) - r.sm);
    const auto own = ch.raw_kraus(theta);
    r.sm_representation = sm_bound_kraus(own, kraus_derivative(ch, theta, 0, cfg), rho0);
    if (own.size() == 1) r.unitary = unitary_attainability(ch, theta, tol, cfg);
    r.warnings.push_back(
        "gauge: canonical Kraus phases fixed by maximal-overlap alignment across the stencil; C_upsilon "
        "depends on this phase convention");
  } else {
    sc = spectral_curve(ch, theta, dir, cfg);
    r.sm = sm_bound_spectral(sc);
  }
  r.gauge_source = sc.gauge_source;
  if (sc.degeneracy_resolved)
    r.warnings.push_back("degenerate eigenvalues at theta; eigenvectors chosen by first-order splitting");

  r.sld = sld_information(sc);
  r.gap = bound_gap(sc);
  r.attainability = attainability_check(sc, tol);

  std::optional<POVM> povm;
  if (choice.kind == PovmChoice::Kind::Fixed) povm = choice.povm;
  if (choice.kind == PovmChoice::Kind::SldOptimal) povm = optimal_povm_from_sld(sld_score(sc));
  if (povm) {
    const FisherResult f = fisher_information(ch, *povm, theta, dir, cfg);
    r.fisher = f.value;
    r.fisher_singular = f.singular;
    if (f.dropped_terms > 0) {
      std::ostringstream msg;
      msg << f.dropped_terms << " Fisher term(s) with p_m <= " << kFisherFloor << " dropped";
      r.warnings.push_back(msg.str());
    }
    if (f.singular) r.warnings.push_back("Fisher information singular: an outcome with p_m = 0 has nonzero slope");
    r.sld_condition = povm_sld_condition_check(*povm, sld_score(sc), DensityMatrix(sc.rho()), tol);
    if (canon) r.sm_condition = povm_sm_condition_check(*povm, canon->ops, canon->derivative,
                                                        DensityMatrix(ch.input_state()), tol);
  }
  if (!r.attainability.attainable)
    r.warnings.push_back(
        "SM bound not attainable here (H < C_upsilon); the SM POVM condition has no solution here and "
        "cannot be used to test for optimal POVMs");
  return r;
}

}  // namespace qfi::bounds
