#include "bsdelab/cameron_martin.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "bsdelab/errors.hpp"
#include "bsdelab/girsanov.hpp"
#include "bsdelab/parallel.hpp"

namespace bsdelab {

double contraction_horizon(double c_u0, double c_f) {
    if (c_u0 < 0.0 || c_f < 0.0) {
        throw ConfigError("contraction_horizon: constants must be non-negative");
    }
    const double prod = c_u0 * c_f;
    if (prod == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(1.0 / (8.0 * prod * prod) + 1.0) - 1.0;
}

double contraction_factor(double t, double c_u0, double c_f) {
    if (t < 0.0) throw ConfigError("contraction_factor: negative horizon");
    return std::sqrt(2.0) * c_u0 * c_f * std::sqrt(t * (t + 2.0));
}

PhiDetail phi_detailed(const TerminalVariable& xi, const CoefficientSet& coeffs, double x,
                       const PathTree& tree) {
    if (&xi.tree() != &tree) throw ConfigError("phi: xi lives on a different tree");
    const int m = coeffs.components;
    const int n = tree.steps();
    const double dt = tree.dt();

    BsdeSolution sol = coeffs.has_g() ? solve_driver_bsde(xi, coeffs.g, coeffs.lip_g)
                                      : solve_martingale_bsde(xi);

    AdaptedProcess fvals(tree, 1, n - 1);
    for (int k = 0; k < n; ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            fvals.level(k)[p] = coeffs.f(sol.y.at(k, p), sol.z.at(k, p));
        }
    }

    // Pathwise left-endpoint drift sum, telescoped forward; the integrand at
    // t_k is F_k-measurable, which keeps the output adapted.
    std::vector<double> drift{0.0};
    for (int k = 0; k < n; ++k) {
        std::vector<double> next(tree.nodes_at(k + 1));
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            const double d = drift[p] + fvals.value(k, p) * dt;
            next[2 * p] = d;
            next[2 * p + 1] = d;
        }
        drift = std::move(next);
    }

    TerminalVariable next(tree, m);
    for (std::uint64_t p = 0; p < tree.leaves(); ++p) {
        coeffs.u0(x + tree.brownian(n, p) - drift[p], next.at(p));
    }
    return {std::move(next), std::move(sol), std::move(fvals)};
}

TerminalVariable phi(const TerminalVariable& xi, const CoefficientSet& coeffs, double x,
                     const PathTree& tree) {
    return phi_detailed(xi, coeffs, x, tree).next;
}

namespace {

void check_range_bound(const TerminalVariable& xi, const CoefficientSet& coeffs) {
    const int m = coeffs.components;
    for (std::uint64_t p = 0; p < xi.tree().leaves(); ++p) {
        for (int i = 0; i < m; ++i) {
            if (std::abs(xi.value(p, i)) > coeffs.sup_u0_comp[i]) {
                throw CheckError("picard_solve: iterate escaped the range of u0 "
                                 "(component " + std::to_string(i) + ")");
            }
        }
    }
}

}  // namespace

PicardResult picard_solve(const CoefficientSet& coeffs, double x, const PathTree& tree,
                          double tol, int max_iter,
                          std::optional<TerminalVariable> start) {
    if (!(tol > 0.0)) throw ConfigError("picard_solve: tol must be positive");
    FixedPointDiagnostics diag;
    diag.tau = contraction_horizon(coeffs.lip_u0, coeffs.lip_f);
    if (tree.horizon() > diag.tau) {
        diag.beyond_horizon = true;
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true)) {
            std::cerr << "picard_solve: horizon " << tree.horizon()
                      << " exceeds the certified contraction horizon " << diag.tau
                      << "; proceeding (the bound is sufficient, not necessary)\n";
        }
    }

    TerminalVariable xi;
    if (start) {
        xi = std::move(*start);
    } else {
        xi = TerminalVariable(tree, coeffs.components);
        for (std::uint64_t p = 0; p < tree.leaves(); ++p) {
            coeffs.u0(x + tree.brownian(tree.steps(), p), xi.at(p));
        }
        check_range_bound(xi, coeffs);
    }

    double prev_distance = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        PhiDetail detail = phi_detailed(xi, coeffs, x, tree);
        check_range_bound(detail.next, coeffs);
        const double d = l2_distance(detail.next, xi);
        diag.iterations = it + 1;
        diag.distances.push_back(d);
        if (prev_distance > 1e-14) diag.ratios.push_back(d / prev_distance);
        prev_distance = d;
        if (d <= tol) {
            diag.final_residual = d;
            return {std::move(xi), std::move(detail), std::move(diag)};
        }
        xi = std::move(detail.next);
    }

    std::ostringstream msg;
    msg << "picard_solve: no convergence after " << max_iter
        << " iterations (tol " << tol << "); distances:";
    for (double d : diag.distances) msg << ' ' << d;
    throw ConvergenceError(msg.str());
}

SolveUResult solve_u(const CoefficientSet& coeffs, const GridSpec& grid, double t_final,
                     int tree_steps, double tol, int max_iter, int threads) {
    const PathTree tree(tree_steps, t_final);
    const int m = coeffs.components;
    SolveUResult out;
    out.u = GridFunction(grid, m);
    out.u.allocate_gradient();

    std::vector<int> iters(grid.points, 0);
    std::vector<double> residuals(grid.points, 0.0);
    std::vector<char> beyond(grid.points, 0);

    parallel_for(grid.points, threads, [&](int i) {
        PicardResult r = picard_solve(coeffs, grid.x(i), tree, tol, max_iter);
        for (int c = 0; c < m; ++c) {
            out.u.values_at(i)[c] = r.detail.sol.y.value(0, 0, c);
            out.u.gradient_at_node(i)[c] = r.detail.sol.z.value(0, 0, c);
        }
        iters[i] = r.diag.iterations;
        residuals[i] = r.diag.final_residual;
        beyond[i] = r.diag.beyond_horizon ? 1 : 0;
    });

    for (int i = 0; i < grid.points; ++i) {
        out.max_iterations = std::max(out.max_iterations, iters[i]);
        out.max_residual = std::max(out.max_residual, residuals[i]);
        out.beyond_horizon = out.beyond_horizon || beyond[i];
    }
    return out;
}

namespace {

// Restart data for one chaining interval: the previous solution, linearly
// interpolated and clamped, stands in for u0.
CoefficientSet restart_coefficients(const CoefficientSet& base, const GridFunction& u) {
    auto snapshot = std::make_shared<GridFunction>(u);
    CoefficientSet cs = base;
    cs.name = base.name + "+restart";
    cs.u0 = [snapshot](double x, std::span<double> out) { snapshot->value(x, out); };
    cs.u0_grad = [snapshot](double x, std::span<double> out) { snapshot->gradient(x, out); };
    cs.u0_hess = nullptr;

    // Interpolation preserves both the sup bound and the nodal slope.
    const int m = base.components;
    cs.sup_u0_comp.assign(m, 0.0);
    for (int i = 0; i < u.grid().points; ++i) {
        for (int c = 0; c < m; ++c) {
            cs.sup_u0_comp[c] = std::max(cs.sup_u0_comp[c], std::abs(u.values_at(i)[c]));
        }
    }
    cs.sup_u0 = 0.0;
    for (double s : cs.sup_u0_comp) cs.sup_u0 = std::max(cs.sup_u0, s);

    double lip = 0.0;
    for (int i = 0; i + 1 < u.grid().points; ++i) {
        double acc = 0.0;
        for (int c = 0; c < m; ++c) {
            const double d = u.values_at(i + 1)[c] - u.values_at(i)[c];
            acc += d * d;
        }
        lip = std::max(lip, std::sqrt(acc) / u.grid().dx());
    }
    cs.lip_u0 = lip;
    return cs;
}

}  // namespace

ChainResult chain_solve(const CoefficientSet& coeffs, const GridSpec& grid,
                        double t_total, int steps_per_interval, double c_u,
                        double tol, int max_iter, int threads) {
    if (!(t_total > 0.0)) throw ConfigError("chain_solve: t_total must be positive");
    if (!(c_u > 0.0) && coeffs.lip_f > 0.0) {
        throw ConfigError("chain_solve: need a positive uniform gradient bound");
    }
    const double tau0 = contraction_horizon(coeffs.lip_u0, coeffs.lip_f);
    const double tau_u = contraction_horizon(c_u, coeffs.lip_f);
    const double limit = std::min(tau0, tau_u);

    ChainResult out;
    out.intervals = std::isinf(limit)
        ? 1
        : std::max(1, static_cast<int>(std::ceil(t_total / limit - 1e-12)));
    out.interval_length = t_total / out.intervals;

    // Each interval consumes sqrt(N dt) + max|f| dt of spatial reach; the
    // work grid is padded so the restart data always covers the tree range.
    const double reach = std::sqrt(steps_per_interval * out.interval_length) +
                         max_abs_f_on_range(coeffs, 512) * out.interval_length;
    const GridSpec work = grid.padded(out.intervals * reach + 0.5);

    GridFunction current;
    for (int j = 0; j < out.intervals; ++j) {
        const CoefficientSet cs =
            (j == 0) ? coeffs : restart_coefficients(coeffs, current);
        if (j > 0) {
            out.lipschitz_per_interval.push_back(cs.lip_u0);
            if (cs.lip_u0 > 2.0 * c_u) {
                throw CheckError("chain_solve: restart gradient " +
                                 std::to_string(cs.lip_u0) + " exceeds 2 * C_u = " +
                                 std::to_string(2.0 * c_u) +
                                 "; the certified bound is violated");
            }
        }
        current = solve_u(cs, work, out.interval_length, steps_per_interval, tol,
                          max_iter, threads).u;
    }

    // Restrict the padded result to the caller's grid (same spacing).
    const int offset = (work.points - grid.points) / 2;
    out.u = GridFunction(grid, coeffs.components);
    out.u.allocate_gradient();
    for (int i = 0; i < grid.points; ++i) {
        for (int c = 0; c < coeffs.components; ++c) {
            out.u.values_at(i)[c] = current.values_at(i + offset)[c];
            out.u.gradient_at_node(i)[c] = current.gradient_at_node(i + offset)[c];
        }
    }
    return out;
}

RepresentationReport check_representation(const TerminalVariable& xi_star,
                                          const CoefficientSet& coeffs, double x,
                                          const PathTree& tree,
                                          const GridFunctionFamily& u_family) {
    PhiDetail detail = phi_detailed(xi_star, coeffs, x, tree);
    const AdaptedProcess b_tilde = compensate(brownian_process(tree), detail.fvals);
    const int m = coeffs.components;
    const double t_final = tree.horizon();

    RepresentationReport rep;
    std::vector<double> buf(m);
    for (int k = 0; k <= tree.steps(); ++k) {
        const double theta = t_final - tree.time_at(k);
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            const double pos = x + b_tilde.value(k, p);
            if (!u_family.snapshot(0).inside(pos)) {
                throw RangeError("check_representation: tree reaches x = " +
                                 std::to_string(pos) + "; extend the oracle grid");
            }
            u_family.value(pos, theta, buf);
            for (int i = 0; i < m; ++i) {
                rep.sup_y_error = std::max(
                    rep.sup_y_error, std::abs(buf[i] - detail.sol.y.value(k, p, i)));
            }
            if (k < tree.steps()) {
                u_family.gradient(pos, theta, buf);
                for (int i = 0; i < m; ++i) {
                    rep.sup_z_error = std::max(
                        rep.sup_z_error, std::abs(buf[i] - detail.sol.z.value(k, p, i)));
                }
            }
        }
    }
    return rep;
}

}  // namespace bsdelab
