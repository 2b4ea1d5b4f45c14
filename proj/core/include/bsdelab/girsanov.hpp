#pragma once

#include "bsdelab/wiener_tree.hpp"

namespace bsdelab {

/// Radon-Nikodym density process R of an equivalent measure, R_0 = 1,
/// R > 0 at every node, E^P[R_k] = 1 for all k.
struct DensityProcess {
    AdaptedProcess r;  // scalar, levels 0..N
};

/// Stochastic exponential of the integrand f: the discrete recursion
/// R_{k+1} = R_k * (1 + f_k * dB_{k+1}) with dB = +-h. Requires
/// |f_k| * h < 1 at every node so R stays positive.
DensityProcess exponential_martingale(const AdaptedProcess& fvals);

/// The equivalent measure with dQ/dP|_{F_k} = R_k. Branch probabilities
/// are the Bayes tilts q_up = R_up / (2 R_parent).
Measure tilt_measure(const DensityProcess& density);

/// Girsanov compensation: X_k - sum_{j<k} z^X_j f_j dt, which is a
/// Q-martingale under tilt_measure(exponential_martingale(f)). The input
/// must be a P-martingale.
AdaptedProcess compensate(const AdaptedProcess& x, const AdaptedProcess& fvals);

/// Max over nodes/components of |D_B(X) - D_Btilde(Xtilde)| where the
/// second density divides sibling differences of the compensated process
/// by sibling differences of the compensated Brownian motion. The
/// invariance is algebraically exact on the tree.
double check_density_invariance(const AdaptedProcess& x, const AdaptedProcess& fvals);

}  // namespace bsdelab
