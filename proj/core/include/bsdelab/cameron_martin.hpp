#pragma once

#include <optional>
#include <vector>

#include "bsdelab/bsde.hpp"
#include "bsdelab/coefficients.hpp"
#include "bsdelab/pde_oracle.hpp"

namespace bsdelab {

/// Largest horizon for which the fixed-point map is provably a contraction:
/// tau = sqrt(1/(8 C_u0^2 C_f^2) + 1) - 1, +inf when C_u0 * C_f == 0.
double contraction_horizon(double c_u0, double c_f);

/// Contraction constant of the fixed-point map in leaf-L2:
/// sqrt(2) * C_u0 * C_f * sqrt(T (T + 2)).
double contraction_factor(double t, double c_u0, double c_f);

/// One application of the fixed-point map
///   xi -> u0(x + B_T - sum_k f(Y_k, Z_k) dt)
/// where (Y, Z) solves the BSDE with terminal value xi (driver-free when
/// g == 0, otherwise through the driver solve).
TerminalVariable phi(const TerminalVariable& xi, const CoefficientSet& coeffs, double x,
                     const PathTree& tree);

/// Same map, keeping the intermediate BSDE solution and the convection
/// values f(Y_k, Z_k) (scalar process on levels 0..N-1).
struct PhiDetail {
    TerminalVariable next;
    BsdeSolution sol;
    AdaptedProcess fvals;
};
PhiDetail phi_detailed(const TerminalVariable& xi, const CoefficientSet& coeffs, double x,
                       const PathTree& tree);

struct FixedPointDiagnostics {
    int iterations = 0;                 // number of phi evaluations
    std::vector<double> distances;      // ||xi_{k+1} - xi_k||_2
    std::vector<double> ratios;         // successive quotients, denominator > 1e-14
    double final_residual = 0.0;        // ||phi(xi*) - xi*||_2 of the returned iterate
    double tau = 0.0;                   // contraction horizon of the coefficients
    bool beyond_horizon = false;        // T > tau (proceeded with a warning)
};

struct PicardResult {
    TerminalVariable xi;
    PhiDetail detail;  // phi data evaluated at the returned xi
    FixedPointDiagnostics diag;
};

/// Picard iteration from xi0 = u0(x + B_T). Returns the first iterate whose
/// measured residual ||phi(xi) - xi||_2 is <= tol. Every iterate is checked
/// against the componentwise |u0^i|_inf bound. Throws ConvergenceError with
/// the ratio history after max_iter evaluations.
PicardResult picard_solve(const CoefficientSet& coeffs, double x, const PathTree& tree,
                          double tol = 1e-10, int max_iter = 25,
                          std::optional<TerminalVariable> start = std::nullopt);

struct SolveUResult {
    GridFunction u;          // values u(x, T), gradient layer = Z(xi*)_0
    int max_iterations = 0;
    double max_residual = 0.0;
    bool beyond_horizon = false;
};

/// u(x, T) = E[Y(xi*)_0] and grad u(x, T) = Z(xi*)_0 for every grid point,
/// each through its own fixed point. threads > 1 parallelizes over grid
/// points (deterministic: each point owns its slot).
SolveUResult solve_u(const CoefficientSet& coeffs, const GridSpec& grid, double t_final,
                     int tree_steps, double tol = 1e-10, int max_iter = 25,
                     int threads = 1);

struct ChainResult {
    GridFunction u;
    int intervals = 0;
    double interval_length = 0.0;
    std::vector<double> lipschitz_per_interval;  // measured slope of each restart datum
};

/// Horizon chaining: splits [0, T_total] into intervals no longer than
/// min(tau(C_u0, C_f), tau(C_u, C_f)) and restarts from the linearly
/// interpolated previous solution. c_u is the caller-certified uniform
/// gradient bound; an interval whose restart datum has slope > 2 c_u stops
/// the chain.
ChainResult chain_solve(const CoefficientSet& coeffs, const GridSpec& grid,
                        double t_total, int steps_per_interval, double c_u,
                        double tol = 1e-10, int max_iter = 25, int threads = 1);

struct RepresentationReport {
    double sup_y_error = 0.0;  // sup |u(x + B~_k, T - t_k) - Y_k|
    double sup_z_error = 0.0;  // gradient analogue
};

/// Checks the representation along the whole tree against a family of
/// oracle snapshots u(., theta); the family must cover the spatial range
/// reachable by x + B~ (RangeError otherwise).
RepresentationReport check_representation(const TerminalVariable& xi_star,
                                          const CoefficientSet& coeffs, double x,
                                          const PathTree& tree,
                                          const GridFunctionFamily& u_family);

}  // namespace bsdelab
