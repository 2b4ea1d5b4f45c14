#include "bsdelab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "bsdelab/errors.hpp"

namespace bsdelab {

namespace {

double simpson_rule(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb, double whole, double tol,
                     int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_rule(fa, flm, fm, a, m);
    const double right = simpson_rule(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) {
        throw ConvergenceError("adaptive_simpson: recursion depth exhausted");
    }
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Hermite polynomial value and derivative (physicists' convention).
void hermite_eval(int n, double x, double& h, double& dh) {
    double h0 = 1.0;
    double h1 = 2.0 * x;
    if (n == 0) {
        h = h0;
        dh = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const double h2 = 2.0 * x * h1 - 2.0 * (k - 1) * h0;
        h0 = h1;
        h1 = h2;
    }
    h = h1;
    dh = 2.0 * n * h0;
}

GaussHermite build_gauss_hermite(int n) {
    GaussHermite gh;
    gh.nodes.resize(n);
    gh.weights.resize(n);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    // Initial guesses per Numerical Recipes, then Newton.
    double z = 0.0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(n, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * gh.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * gh.nodes[1];
        } else {
            z = 2.0 * z - gh.nodes[i - 2];
        }
        double h = 0.0, dh = 1.0;
        for (int it = 0; it < 100; ++it) {
            hermite_eval(n, z, h, dh);
            const double dz = h / dh;
            z -= dz;
            if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        hermite_eval(n, z, h, dh);
        gh.nodes[i] = z;
        gh.nodes[n - 1 - i] = -z;
        // w = 2^{n+1} n! sqrt(pi) / H'_n(z)^2, computed via the recurrence value.
        double logw = (n + 1) * std::numbers::ln2 + 0.5 * std::log(std::numbers::pi);
        for (int k = 2; k <= n; ++k) logw += std::log(static_cast<double>(k));
        const double w = std::exp(logw) / (dh * dh);
        gh.weights[i] = w;
        gh.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        gh.nodes[n / 2] = 0.0;
    }
    // Normalize the total weight to sqrt(pi) exactly (guards rounding drift).
    double total = 0.0;
    for (double w : gh.weights) total += w;
    const double scale = sqrt_pi / total;
    for (double& w : gh.weights) w *= scale;
    return gh;
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson_rule(fa, fm, fb, a, b);
    return adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

const GaussHermite& gauss_hermite(int order) {
    static std::map<int, GaussHermite> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, build_gauss_hermite(order)).first;
    }
    return it->second;
}

double gaussian_expectation(const std::function<double(double)>& w, double x, double s,
                            int order) {
    if (s == 0.0) return w(x);
    const GaussHermite& gh = gauss_hermite(order);
    const double scale = std::sqrt(2.0 * s);
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        acc += gh.weights[i] * w(x + scale * gh.nodes[i]);
    }
    return acc / std::sqrt(std::numbers::pi);
}

}  // namespace bsdelab
