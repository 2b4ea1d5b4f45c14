#pragma once

#include <functional>
#include <span>

#include "bsdelab/wiener_tree.hpp"

namespace bsdelab {

/// Driver g(t, y, z) -> R^m; y and z are R^m (one Brownian factor).
using Driver = std::function<void(double t, std::span<const double> y,
                                  std::span<const double> z, std::span<double> out)>;

/// Solution of dY = -g(t, Y, Z) dt + dS on the tree under the symmetric
/// measure. Y lives on levels 0..N, Z on 0..N-1, and S is the martingale
/// part (Y plus the accumulated driver), with S - S_0 = ito_sum(Z, B)
/// exactly.
struct BsdeSolution {
    AdaptedProcess y;
    AdaptedProcess z;
    AdaptedProcess s;
    Driver driver;  // empty for the driver-free case
};

/// Driver-free case: Y_k = E[xi | F_k], Z the representation density.
BsdeSolution solve_martingale_bsde(const TerminalVariable& xi);

/// Explicit backward scheme
///   Y_k = E[Y_{k+1}|F_k] + g(t_k, E[Y_{k+1}|F_k], Z_k) dt,
///   Z_k = (Y_{k+1}^up - Y_{k+1}^down) / (2h).
/// Requires T * lip_g < 1 (one-step scheme stability).
BsdeSolution solve_driver_bsde(const TerminalVariable& xi, Driver g, double lip_g);

/// Result of the change of measure applied to a BSDE solution: the same Y,
/// the compensated martingale part, its density w.r.t. the compensated
/// Brownian motion, the tilted measure, and the worst-node residual of
/// the transformed backward equation
///   dY = -g(t,Y,Ztilde) dt + Ztilde f dt + dStilde
/// under Q. The residual is algebraically zero; anything above rounding
/// indicates a bug.
struct TransformedBsde {
    AdaptedProcess y;
    AdaptedProcess s_tilde;
    AdaptedProcess z_tilde;
    Measure q;
    double max_residual;
};

TransformedBsde transform_bsde(const BsdeSolution& sol, const AdaptedProcess& fvals);

}  // namespace bsdelab
