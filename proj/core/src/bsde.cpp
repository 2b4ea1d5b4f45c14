#include "bsdelab/bsde.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bsdelab/errors.hpp"
#include "bsdelab/girsanov.hpp"

namespace bsdelab {

namespace {

// Shared backward induction. With g == nullptr this is plain conditional
// expectation plus the representation density.
BsdeSolution solve_backward(const TerminalVariable& xi, Driver g) {
    const PathTree& tree = xi.tree();
    const int m = xi.components();
    const int n = tree.steps();
    const double dt = tree.dt();
    const double two_h = 2.0 * tree.step_width();

    AdaptedProcess y(tree, m, n);
    AdaptedProcess z(tree, m, n - 1);
    y.level(n) = xi.data();

    std::vector<double> gval(m);
    for (int k = n - 1; k >= 0; --k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            auto yk = y.at(k, p);
            auto zk = z.at(k, p);
            const auto yu = y.at(k + 1, 2 * p + 1);
            const auto yd = y.at(k + 1, 2 * p);
            for (int i = 0; i < m; ++i) {
                yk[i] = 0.5 * (yu[i] + yd[i]);
                zk[i] = (yu[i] - yd[i]) / two_h;
            }
            if (g) {
                g(tree.time_at(k), yk, zk, gval);
                for (int i = 0; i < m; ++i) yk[i] += gval[i] * dt;
            }
        }
    }

    // Martingale part: dS = Y_{k+1} - E[Y_{k+1}|F_k], started at Y_0.
    AdaptedProcess s(tree, m, n);
    s.level(0) = y.level(0);
    for (int k = 0; k < n; ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            const auto yu = y.at(k + 1, 2 * p + 1);
            const auto yd = y.at(k + 1, 2 * p);
            for (std::uint64_t c = 2 * p; c <= 2 * p + 1; ++c) {
                for (int i = 0; i < m; ++i) {
                    const double mean = 0.5 * (yu[i] + yd[i]);
                    s.at(k + 1, c)[i] = s.value(k, p, i) + y.value(k + 1, c, i) - mean;
                }
            }
        }
    }
    return {std::move(y), std::move(z), std::move(s), std::move(g)};
}

}  // namespace

BsdeSolution solve_martingale_bsde(const TerminalVariable& xi) {
    return solve_backward(xi, nullptr);
}

BsdeSolution solve_driver_bsde(const TerminalVariable& xi, Driver g, double lip_g) {
    if (lip_g < 0.0) {
        throw ConfigError("solve_driver_bsde: Lipschitz constant must be >= 0");
    }
    const double t_lip = xi.tree().horizon() * lip_g;
    if (!(t_lip < 1.0)) {
        throw GuardError("solve_driver_bsde: T * Lip(g) = " + std::to_string(t_lip) +
                         " >= 1; shorten the horizon or split the interval");
    }
    return solve_backward(xi, std::move(g));
}

TransformedBsde transform_bsde(const BsdeSolution& sol, const AdaptedProcess& fvals) {
    const PathTree& tree = sol.y.tree();
    if (&tree != &fvals.tree()) {
        throw ConfigError("transform_bsde: arguments live on different trees");
    }
    const int m = sol.y.components();
    const int n = tree.steps();
    const double dt = tree.dt();

    AdaptedProcess s_tilde = compensate(sol.s, fvals);  // guards |f|h < 1 downstream
    Measure q = tilt_measure(exponential_martingale(fvals));
    const AdaptedProcess b_tilde = compensate(brownian_process(tree), fvals);

    // Density of S~ against B~ by sibling differences.
    AdaptedProcess z_tilde(tree, m, n - 1);
    for (int k = 0; k < n; ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            const double db =
                b_tilde.value(k + 1, 2 * p + 1) - b_tilde.value(k + 1, 2 * p);
            for (int i = 0; i < m; ++i) {
                z_tilde.at(k, p)[i] =
                    (s_tilde.value(k + 1, 2 * p + 1, i) - s_tilde.value(k + 1, 2 * p, i)) / db;
            }
        }
    }

    // Residual of the transformed recursion, per child node and component:
    //   Y_{k+1} - Y_k + g(t_k, Ybar_k, Z~_k) dt - Z~_k f_k dt - (S~_{k+1} - S~_k).
    double worst = 0.0;
    std::vector<double> gval(m, 0.0);
    std::vector<double> ybar(m);
    for (int k = 0; k < n; ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            for (int i = 0; i < m; ++i) {
                ybar[i] = 0.5 * (sol.y.value(k + 1, 2 * p + 1, i) +
                                 sol.y.value(k + 1, 2 * p, i));
            }
            if (sol.driver) {
                sol.driver(tree.time_at(k), ybar, z_tilde.at(k, p), gval);
            }
            const double f = fvals.value(k, p);
            for (std::uint64_t c = 2 * p; c <= 2 * p + 1; ++c) {
                for (int i = 0; i < m; ++i) {
                    const double res =
                        sol.y.value(k + 1, c, i) - sol.y.value(k, p, i) +
                        gval[i] * dt - z_tilde.value(k, p, i) * f * dt -
                        (s_tilde.value(k + 1, c, i) - s_tilde.value(k, p, i));
                    worst = std::max(worst, std::abs(res));
                }
            }
        }
    }
    return {sol.y, std::move(s_tilde), std::move(z_tilde), std::move(q), worst};
}

}  // namespace bsdelab
