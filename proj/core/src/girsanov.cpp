#include "bsdelab/girsanov.hpp"

#include <cmath>
#include <string>

#include "bsdelab/errors.hpp"

namespace bsdelab {

namespace {

void require_integrand(const AdaptedProcess& fvals) {
    if (fvals.components() != 1) {
        throw ConfigError("girsanov: f must be a scalar process");
    }
    if (fvals.max_level() < fvals.tree().steps() - 1) {
        throw ConfigError("girsanov: f must be defined on levels 0..N-1");
    }
}

}  // namespace

DensityProcess exponential_martingale(const AdaptedProcess& fvals) {
    require_integrand(fvals);
    const PathTree& tree = fvals.tree();
    const double h = tree.step_width();
    AdaptedProcess r(tree, 1, tree.steps());
    r.level(0)[0] = 1.0;
    for (int k = 0; k < tree.steps(); ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            const double f = fvals.value(k, p);
            if (!(std::abs(f) * h < 1.0)) {
                throw GuardError(
                    "exponential_martingale: |f|*h >= 1 at level " + std::to_string(k) +
                    " (|f|=" + std::to_string(std::abs(f)) + ", h=" + std::to_string(h) +
                    "); increase the step count N");
            }
            const double rp = r.value(k, p);
            r.level(k + 1)[2 * p] = rp * (1.0 - f * h);
            r.level(k + 1)[2 * p + 1] = rp * (1.0 + f * h);
        }
    }
    return {std::move(r)};
}

Measure tilt_measure(const DensityProcess& density) {
    const AdaptedProcess& r = density.r;
    if (r.components() != 1 || r.max_level() != r.tree().steps()) {
        throw ConfigError("tilt_measure: density must be scalar on levels 0..N");
    }
    const PathTree& tree = r.tree();
    std::vector<std::vector<double>> up(tree.steps());
    for (int k = 0; k < tree.steps(); ++k) {
        up[k].resize(tree.nodes_at(k));
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            const double rp = r.value(k, p);
            if (!(rp > 0.0)) {
                throw GuardError("tilt_measure: density not strictly positive");
            }
            up[k][p] = 0.5 * r.value(k + 1, 2 * p + 1) / rp;
        }
    }
    return Measure::tilted(tree, std::move(up));
}

AdaptedProcess compensate(const AdaptedProcess& x, const AdaptedProcess& fvals) {
    require_integrand(fvals);
    if (&x.tree() != &fvals.tree()) {
        throw ConfigError("compensate: arguments live on different trees");
    }
    const PathTree& tree = x.tree();
    const Measure p_meas = Measure::symmetric(tree);
    const AdaptedProcess z = martingale_density(x, p_meas);
    const int m = x.components();
    const double dt = tree.dt();

    AdaptedProcess out(tree, m, tree.steps());
    out.level(0) = x.level(0);
    for (int k = 0; k < tree.steps(); ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            const double f = fvals.value(k, p);
            for (std::uint64_t c = 2 * p; c <= 2 * p + 1; ++c) {
                for (int i = 0; i < m; ++i) {
                    const double dx = x.value(k + 1, c, i) - x.value(k, p, i);
                    out.at(k + 1, c)[i] =
                        out.value(k, p, i) + dx - z.value(k, p, i) * f * dt;
                }
            }
        }
    }
    return out;
}

double check_density_invariance(const AdaptedProcess& x, const AdaptedProcess& fvals) {
    require_integrand(fvals);
    const PathTree& tree = x.tree();
    const Measure p_meas = Measure::symmetric(tree);
    const AdaptedProcess z = martingale_density(x, p_meas);
    const AdaptedProcess x_tilde = compensate(x, fvals);
    const AdaptedProcess b_tilde = compensate(brownian_process(tree), fvals);

    const int m = x.components();
    double worst = 0.0;
    for (int k = 0; k < tree.steps(); ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            // The predictable compensator shifts both children equally, so the
            // sibling difference of B~ is exactly 2h; degenerate only if the
            // positivity guard was bypassed.
            const double db = b_tilde.value(k + 1, 2 * p + 1) - b_tilde.value(k + 1, 2 * p);
            if (std::abs(db) < 1e-300) {
                throw GuardError("check_density_invariance: degenerate sibling "
                                 "difference of the compensated Brownian motion");
            }
            for (int i = 0; i < m; ++i) {
                const double dx =
                    x_tilde.value(k + 1, 2 * p + 1, i) - x_tilde.value(k + 1, 2 * p, i);
                worst = std::max(worst, std::abs(z.value(k, p, i) - dx / db));
            }
        }
    }
    return worst;
}

}  // namespace bsdelab
