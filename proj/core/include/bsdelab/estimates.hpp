#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bsdelab/coefficients.hpp"
#include "bsdelab/pde_oracle.hpp"

namespace bsdelab {

struct EstimateOptions {
    int tree_steps = 12;
    double oracle_dx = 0.02;
    double dt_pde = 0.0;   // 0 -> largest admissible
    double slack = 0.10;
    double x = 0.0;        // expansion point for ops that do not take x
    double picard_tol = 1e-10;
    int picard_max_iter = 50;
};

/// One evaluated inequality: per-component left/right sides and the slack
/// used; pass means lhs <= rhs * (1 + slack) for every component.
struct EstimateReport {
    std::string name;
    std::vector<double> lhs;
    std::vector<double> rhs;
    double slack = 0.0;
    bool pass = false;

    // Inputs echo.
    std::string coefficients;
    double x = 0.0;
    double horizon = 0.0;      // T
    double t_requested = 0.0;
    double t_actual = 0.0;     // snapped to the tree grid
    double p = 0.0;
    int tree_steps = 0;
    GridSpec grid{};

    // Small-time trend of the quadratic-variation rate (estimate_two).
    std::vector<double> rate_at_dt, rate_at_2dt, rate_at_4dt;
};

/// int_0^t P_s |grad u^i|^p (x, T-s) ds  vs
/// (E<Y^i>_t)^{p/2} (int_0^t E R_s^{2/(2-p)} ds)^{1-p/2}.
/// Left side through the finite-difference oracle and heat quadrature,
/// right side exactly on the tree. Requires f = f(y), g == 0, p in [1, 2).
EstimateReport estimate_one(const CoefficientSet& coeffs, double x, double t_final,
                            double t, double p, const EstimateOptions& opts = {});

/// |grad u^i|^2 (x, T) vs the smallest-time quadratic-variation rate
/// (1/dt) E<Y^i>_dt; the rates at 2dt and 4dt are recorded alongside.
EstimateReport estimate_two(const CoefficientSet& coeffs, double x, double t_final,
                            const EstimateOptions& opts = {});

/// E[R_t^{2/(2-p)}] (exact leaf sum) vs
/// exp(p/(2-p)^2 * t * max_{range box} |f|^2), the max sampled densely.
EstimateReport density_moment_bound(const CoefficientSet& coeffs, double t, double p,
                                    const EstimateOptions& opts = {});

/// Closed-form right side: |u0^i|_inf^p * exp(p/(2(2-p)) * t * max |f|^2).
EstimateReport gradient_corollary(const CoefficientSet& coeffs, double x, double t_final,
                                  double t, double p, const EstimateOptions& opts = {});

std::string to_json_string(const EstimateReport& report);
void write_csv_summary(const std::vector<EstimateReport>& reports, std::ostream& os);

}  // namespace bsdelab
