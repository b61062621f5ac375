#include "qfi/random_models.hpp"

#include <cmath>

#include "qfi/errors.hpp"

namespace qfi::randomized {

namespace {

ComplexMatrix ginibre(int rows, int cols, Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

}  // namespace

ComplexMatrix random_unitary(int dim, Engine& rng) {
  const Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(dim, dim, rng));
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

ComplexMatrix random_hermitian(int dim, Engine& rng, double scale) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  return (0.5 * scale) * (g + g.adjoint());
}

PureState random_pure_state(int dim, Engine& rng) { return PureState::normalized(ginibre(dim, 1, rng).col(0)); }

POVM random_povm(int dim, int outcomes, Engine& rng) {
  if (outcomes < 1) throw ValidationError("random_povm: need at least one outcome");
  std::vector<ComplexMatrix> raw;
  ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
  for (int m = 0; m < outcomes; ++m) {
    const ComplexMatrix g = ginibre(dim, dim, rng);
    raw.push_back(g.adjoint() * g);
    total += raw.back();
  }
  const linalg::EigenSystem es = linalg::hermitian_eigendecompose(0.5 * (total + total.adjoint()));
  const RealVector inv_root = es.values.cwiseSqrt().cwiseInverse();
  const ComplexMatrix s = es.vectors * inv_root.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  std::vector<ComplexMatrix> elements;
  for (const auto& a : raw) {
    const ComplexMatrix m = s * a * s;
    elements.push_back(0.5 * (m + m.adjoint()));
  }
  // absorb the completeness residual into the first element
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& m : elements) sum += m;
  elements.front() += ComplexMatrix::Identity(dim, dim) - sum;
  return POVM(std::move(elements));
}

ParametricChannel random_kraus_channel(int dim, int env, int params, Engine& rng, double generator_scale) {
  if (dim < 1 || env < 1 || params < 1) throw ValidationError("random_kraus_channel: sizes must be positive");
  const int total = dim * env;
  std::vector<ComplexMatrix> generators;
  for (int l = 0; l < params; ++l) generators.push_back(random_hermitian(total, rng, generator_scale));
  const ProductExponential curve(random_unitary(total, rng), std::move(generators));

  auto blocks = [dim, env](const ComplexMatrix& v) {
    std::vector<ComplexMatrix> ops;
    for (int k = 0; k < env; ++k) ops.push_back(v.block(k * dim, 0, dim, dim));
    return ops;
  };
  auto kraus = [curve, blocks](const ParamPoint& t) { return blocks(curve.value(t)); };
  auto deriv = [curve, blocks](const ParamPoint& t, int l) { return blocks(curve.partial(t, l)); };
  Domain domain{std::vector<double>(static_cast<std::size_t>(params), 0.0),
                std::vector<double>(static_cast<std::size_t>(params), 1.0)};
  return ParametricChannel::kraus_curve("random", dim, std::move(domain), kraus, deriv, random_pure_state(dim, rng));
}

ParametricChannel random_remixing(const ParametricChannel& ch, bool theta_dependent, Engine& rng) {
  const auto n = static_cast<int>(ch.raw_kraus(ch.domain().midpoint()).size());
  std::vector<ComplexMatrix> generators;
  if (theta_dependent)
    for (int l = 0; l < ch.param_count(); ++l) generators.push_back(random_hermitian(n, rng));
  return remix(ch, ProductExponential(random_unitary(n, rng), std::move(generators)));
}

ParamPoint random_interior_point(const ParametricChannel& ch, double margin, Engine& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ParamPoint out;
  for (int l = 0; l < ch.param_count(); ++l) {
    const double lo = ch.domain().lo[static_cast<std::size_t>(l)] + margin;
    const double hi = ch.domain().hi[static_cast<std::size_t>(l)] - margin;
    out.push_back(lo + (hi - lo) * unit(rng));
  }
  return out;
}

std::vector<double> random_direction(int params, Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(params));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm += x * x;
    }
  } while (norm < 1e-12);
  for (double& x : v) x /= std::sqrt(norm);
  return v;
}

}  // namespace qfi::randomized
