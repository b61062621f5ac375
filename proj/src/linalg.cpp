#include "qfi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qfi/errors.hpp"

namespace qfi::linalg {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kPsdClamp = 1e-8;

bool lexicographic_less(const ComplexVector& a, const ComplexVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(a - a.adjoint());
}

void normalize_phase(Eigen::Ref<ComplexVector> v) {
  if (v.size() == 0) return;
  double best = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) best = std::max(best, std::abs(v[i]));
  if (best == 0.0) return;
  // first entry within round-off of the maximum wins, so ties are stable
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= best * (1.0 - 1e-12)) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      v[i] = Complex(v[i].real(), 0.0);
      return;
    }
  }
}

EigenSystem hermitian_eigendecompose(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ValidationError("eigendecomposition needs a square matrix");
  const double asym = hermiticity_defect(a);
  if (asym >= kHermitianTol) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian (max |A - A^dagger| = " << asym << ")";
    throw ValidationError(msg.str());
  }
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");

  const Eigen::Index n = a.rows();
  RealVector values = solver.eigenvalues();
  ComplexMatrix vectors = solver.eigenvectors();
  for (Eigen::Index k = 0; k < n; ++k) normalize_phase(vectors.col(k));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  // Eigen already sorts ascending; only clusters need the tie-break
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && values[stop] - values[stop - 1] < kClusterTol) ++stop;
    std::stable_sort(order.begin() + start, order.begin() + stop,
                     [&](Eigen::Index x, Eigen::Index y) {
                       return lexicographic_less(vectors.col(x), vectors.col(y));
                     });
    start = stop;
  }

  EigenSystem out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = values[order[static_cast<std::size_t>(k)]];
    out.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

RealVector symmetric_eigenvalues(const RealMatrix& a) {
  if (a.size() == 0) return RealVector();
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
  const EigenSystem es = hermitian_eigendecompose(a);
  RealVector roots(es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    const double v = es.values[k];
    if (v < -kPsdClamp) {
      std::ostringstream msg;
      msg << "matrix is not positive semidefinite (eigenvalue " << v << ")";
      throw ValidationError(msg.str());
    }
    roots[k] = std::sqrt(std::max(v, 0.0));
  }
  ComplexMatrix out = es.vectors * roots.asDiagonal() * es.vectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

ComplexMatrix unitary_exp(const ComplexMatrix& h, double t) {
  const EigenSystem es = hermitian_eigendecompose(h);
  ComplexVector phases(es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) phases[k] = std::polar(1.0, -t * es.values[k]);
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

LoewnerVerdict loewner_leq(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("loewner_leq: dimension mismatch");
  if (a.size() == 0) return {true, 0.0};
  const ComplexMatrix diff = b - a;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  return {lo >= -tol, lo};
}

LoewnerVerdict loewner_leq(const RealMatrix& a, const RealMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("loewner_leq: dimension mismatch");
  if (a.size() == 0) return {true, 0.0};
  const double lo = symmetric_eigenvalues(b - a).minCoeff();
  return {lo >= -tol, lo};
}

PseudoInverse symmetric_pinv(const RealMatrix& a, double rel_tol) {
  PseudoInverse out{RealMatrix::Zero(a.rows(), a.cols()), 0};
  if (a.size() == 0) return out;
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(0.5 * (a + a.transpose()));
  const RealVector& values = solver.eigenvalues();
  const double cutoff = rel_tol * std::max(values.cwiseAbs().maxCoeff(), 0.0);
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (std::abs(values[k]) <= cutoff || values[k] == 0.0) continue;
    const auto& v = solver.eigenvectors().col(k);
    out.matrix += (v * v.transpose()) / values[k];
    ++out.rank;
  }
  return out;
}

double Stencil::reach() const {
  double r = 0.0;
  for (double o : offsets) r = std::max(r, std::abs(o));
  return r;
}

namespace {

Stencil base_stencil(double h, DiffScheme scheme) {
  if (scheme == DiffScheme::Central2) return {{-h, h}, {-0.5 / h, 0.5 / h}};
  return {{-2 * h, -h, h, 2 * h}, {1.0 / (12 * h), -8.0 / (12 * h), 8.0 / (12 * h), -1.0 / (12 * h)}};
}

}  // namespace

Stencil make_stencil(const DiffConfig& cfg) {
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) throw ValidationError("finite-difference step must be > 0");
  const Stencil coarse = base_stencil(cfg.step, cfg.scheme);
  if (!cfg.richardson) return coarse;

  // D = (2^p D(h/2) - D(h)) / (2^p - 1), p the truncation order
  const double gain = cfg.scheme == DiffScheme::Central2 ? 4.0 : 16.0;
  const Stencil fine = base_stencil(0.5 * cfg.step, cfg.scheme);
  Stencil out;
  for (std::size_t i = 0; i < coarse.offsets.size(); ++i) {
    out.offsets.push_back(coarse.offsets[i]);
    out.weights.push_back(-coarse.weights[i] / (gain - 1.0));
  }
  for (std::size_t i = 0; i < fine.offsets.size(); ++i) {
    auto it = std::find(out.offsets.begin(), out.offsets.end(), fine.offsets[i]);
    const double w = gain * fine.weights[i] / (gain - 1.0);
    if (it != out.offsets.end()) {
      out.weights[static_cast<std::size_t>(it - out.offsets.begin())] += w;
    } else {
      out.offsets.push_back(fine.offsets[i]);
      out.weights.push_back(w);
    }
  }
  return out;
}

ComplexMatrix differentiate_curve(const std::function<ComplexMatrix(double)>& curve, double x,
                                  const DiffConfig& cfg) {
  const Stencil st = make_stencil(cfg);
  ComplexMatrix acc;
  for (std::size_t i = 0; i < st.offsets.size(); ++i) {
    ComplexMatrix value;
    try {
      value = curve(x + st.offsets[i]);
    } catch (const Error& e) {
      throw NumericError(std::string("curve evaluation failed inside the stencil: ") + e.what());
    }
    if (!value.allFinite()) throw NumericError("curve evaluation produced non-finite entries inside the stencil");
    if (i == 0) {
      acc = st.weights[i] * value;
    } else {
      if (value.rows() != acc.rows() || value.cols() != acc.cols())
        throw NumericError("curve changes shape inside the stencil");
      acc += st.weights[i] * value;
    }
  }
  return acc;
}

}  // namespace qfi::linalg
