#pragma once

// Seeded random states, POVMs, unitaries and channel curves for the
// property suites.

#include <cstdint>
#include <random>

#include "qfi/channels.hpp"

namespace qfi::randomized {

using Engine = std::mt19937_64;

/// Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix).
ComplexMatrix random_unitary(int dim, Engine& rng);
/// Hermitian matrix with Gaussian entries, scaled by `scale`.
ComplexMatrix random_hermitian(int dim, Engine& rng, double scale = 1.0);
PureState random_pure_state(int dim, Engine& rng);
/// POVM with `outcomes` full-rank elements S^{-1/2} A_m S^{-1/2}.
POVM random_povm(int dim, int outcomes, Engine& rng);

/// Kraus curve E_k(theta) = (<k| x I) V(theta) (|0> x I) where
/// V(theta) = exp(-i theta_m G_m) ... exp(-i theta_1 G_1) V0 acts on
/// C^env x C^dim. Domain [0, 1]^params, random pure input.
ParametricChannel random_kraus_channel(int dim, int env, int params, Engine& rng, double generator_scale = 1.0);

/// The same channel with its Kraus operators remixed by a random unitary,
/// fixed or with one random generator per parameter.
ParametricChannel random_remixing(const ParametricChannel& ch, bool theta_dependent, Engine& rng);

/// Uniform point in the channel domain shrunk by `margin` on every side.
ParamPoint random_interior_point(const ParametricChannel& ch, double margin, Engine& rng);

/// Unit vector with Gaussian components.
std::vector<double> random_direction(int params, Engine& rng);

}  // namespace qfi::randomized
