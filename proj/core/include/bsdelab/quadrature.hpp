#pragma once

#include <functional>
#include <vector>

namespace bsdelab {

/// Adaptive Simpson integration of f over [a, b] to the given absolute
/// tolerance. Throws ConvergenceError if the recursion depth is exhausted.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

/// Gauss-Hermite nodes/weights for integrals against e^{-t^2} dt.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes by Newton iteration on the Hermite recurrence; cached per order.
const GaussHermite& gauss_hermite(int order);

/// E[w(x + sqrt(s) * G)] for a standard Gaussian G, via Gauss-Hermite.
double gaussian_expectation(const std::function<double(double)>& w, double x, double s,
                            int order = 64);

}  // namespace bsdelab
