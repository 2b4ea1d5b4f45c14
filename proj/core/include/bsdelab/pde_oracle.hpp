#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bsdelab/coefficients.hpp"

namespace bsdelab {

struct GridSpec {
    double x_min = -1.0;
    double x_max = 1.0;
    int points = 3;

    double dx() const { return (x_max - x_min) / (points - 1); }
    double x(int i) const { return x_min + i * dx(); }
    /// Same spacing, widened by ceil(pad/dx) points on each side.
    GridSpec padded(double pad) const;
};

/// m-component function on a uniform spatial grid, with an optional
/// gradient layer (central differences in the interior, one-sided at the
/// ends). Evaluation between nodes is piecewise linear; outside the grid
/// the value is clamped to the boundary node.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(const GridSpec& grid, int components);

    static GridFunction sample(const GridSpec& grid, int components,
                               const std::function<void(double, std::span<double>)>& fn);

    const GridSpec& grid() const { return grid_; }
    int components() const { return components_; }
    bool has_gradient() const { return !gradient_.empty(); }

    std::span<double> values_at(int i);
    std::span<const double> values_at(int i) const;
    std::span<double> gradient_at_node(int i);
    std::span<const double> gradient_at_node(int i) const;

    void value(double x, std::span<double> out) const;
    void gradient(double x, std::span<double> out) const;
    /// Central second difference of the value layer.
    void second_derivative(double x, std::span<double> out) const;

    bool inside(double x) const { return x >= grid_.x_min && x <= grid_.x_max; }
    double sup_norm() const;           // max over nodes/components of |value|
    double sup_gradient_norm() const;  // same for the gradient layer

    void compute_gradient();
    /// Zero-filled gradient layer, for callers that supply their own.
    void allocate_gradient() { gradient_.assign(values_.size(), 0.0); }

    /// CSV columns: x, u1..um, du1..dum.
    void write_csv(std::ostream& os) const;

    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

private:
    GridSpec grid_;
    int components_ = 0;
    std::vector<double> values_;
    std::vector<double> gradient_;
};

/// Time-indexed snapshots of a GridFunction; evaluation between snapshot
/// times is linear in t.
class GridFunctionFamily {
public:
    GridFunctionFamily() = default;
    GridFunctionFamily(std::vector<double> times, std::vector<GridFunction> snapshots);

    const std::vector<double>& times() const { return times_; }
    const GridFunction& snapshot(std::size_t j) const { return snapshots_[j]; }
    std::size_t size() const { return snapshots_.size(); }
    const GridSpec& grid() const { return snapshots_.front().grid(); }

    void value(double x, double t, std::span<double> out) const;
    void gradient(double x, double t, std::span<double> out) const;

private:
    // Bracketing indices and blend weight for time t.
    void locate(double t, std::size_t& j0, std::size_t& j1, double& w) const;

    std::vector<double> times_;
    std::vector<GridFunction> snapshots_;
};

/// Explicit finite-difference solve of
///   du^i/dt + f(u, du) du^i/dx = 1/2 d2u^i/dx2 + g^i(u, du)
/// with Neumann (zero-gradient) boundaries, central differences for both
/// the convection term and the coefficient arguments. Enforces the CFL
/// guards dt <= 0.9 dx^2 and dt max|f| <= 0.9 dx, and (for g == 0) checks
/// the discrete maximum principle along the way.
GridFunction solve_fd(const CoefficientSet& coeffs, const GridSpec& grid, double t_final,
                      double dt_pde);

/// Same march, capturing snapshots at the requested times (ascending,
/// within [0, t_final]); snapshot values are linearly blended between the
/// bracketing steps. Gradient layers are filled in.
GridFunctionFamily solve_fd_family(const CoefficientSet& coeffs, const GridSpec& grid,
                                   double t_final, double dt_pde,
                                   const std::vector<double>& snapshot_times);

/// Largest stable dt for the given data (0.9 of both CFL limits).
double admissible_fd_dt(const CoefficientSet& coeffs, const GridSpec& grid);

/// Exact solution of u_t + u u_x = 1/2 u_xx at (x, t_final) through the
/// logarithmic substitution u = -d/dx log(phi) with phi the heat evolution
/// of exp(-int u0): evaluated by adaptive quadrature to 1e-8 relative.
double cole_hopf(const std::function<double(double)>& u0, double x, double t_final,
                 double support_scale = 4.0);

/// Cross-check variant: the same value from two independent quadrature
/// routes (adaptive Simpson on the averaged-initial-data form, Gauss-Hermite
/// on the kernel-derivative form). Returns {simpson, gauss_hermite}.
std::pair<double, double> cole_hopf_cross(const std::function<double(double)>& u0,
                                          double x, double t_final,
                                          double support_scale = 4.0);

/// Heat semigroup applied to a grid function: E[w(x + sqrt(s) G)] per
/// component; s = 0 returns w(x). Evaluations beyond the grid clamp (a
/// warning counter is bumped).
std::vector<double> heat_apply(const GridFunction& w, double s, double x);
double heat_apply(const std::function<double(double)>& w, double s, double x);

/// Clamped-evaluation count from heat_apply(GridFunction) calls.
std::size_t heat_apply_clamp_count();

}  // namespace bsdelab
