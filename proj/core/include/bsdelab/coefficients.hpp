#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bsdelab/bsde.hpp"

namespace bsdelab {

/// Problem data (u0, f, g) with certified constants. u0: R -> R^m is the
/// initial condition, f: R^m x R^m -> R the convection coefficient
/// (one spatial dimension on the tree backend), g an optional driver.
///
/// Instances come from the built-in catalog; keeping the set closed is what
/// makes the constant certification tractable.
struct CoefficientSet {
    std::string name;
    int components = 1;  // m

    std::function<void(double, std::span<double>)> u0;
    std::function<void(double, std::span<double>)> u0_grad;
    std::function<void(double, std::span<double>)> u0_hess;

    std::function<double(std::span<const double>, std::span<const double>)> f;
    std::function<void(std::span<const double>, std::span<double>)> f_grad;  // d f / d y_i
    std::function<void(std::span<const double>, std::span<double>)> f_hess;  // m*m, row-major

    Driver g;            // empty means g == 0
    double lip_g = 0.0;

    bool f_depends_z = false;

    double lip_u0 = 0.0;                 // C_u0
    double sup_u0 = 0.0;                 // |u0|_inf over all components (Euclidean)
    std::vector<double> sup_u0_comp;     // per-component |u0^i|_inf
    double lip_f = 0.0;                  // C_f

    // Flow bounds: |grad^{k-1} u0| <= c0 and |grad^k f| <= c1 for k = 1,2,3.
    double c0 = 0.0;
    double c1 = 0.0;

    double domain_scale = 4.0;  // spatial support scale, used for grid padding

    bool has_g() const { return static_cast<bool>(g); }
};

/// Built-in catalog: zero | constant(c) | burgers | tanh_clamped(a) |
/// two_component_mix. Throws ConfigError for unknown names or parameters.
/// Every entry is certified on construction.
CoefficientSet coefficient_catalog(const std::string& name,
                                   const std::map<std::string, double>& params = {});

/// Verifies the declared constants against sampled quotients/values; throws
/// CheckError when a declared constant is violated.
void certify(const CoefficientSet& c);

/// sup |f| over the box prod_i [-sup_u0_comp[i], sup_u0_comp[i]] sampled
/// with the given number of points per component axis (m <= 2).
double max_abs_f_on_range(const CoefficientSet& c, int samples_per_axis = 4096);

/// Same box, sup of |f|^2 (convenience for the density moment bounds).
double max_f_squared_on_range(const CoefficientSet& c, int samples_per_axis = 4096);

}  // namespace bsdelab
