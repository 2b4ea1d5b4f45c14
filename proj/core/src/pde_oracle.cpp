#include "bsdelab/pde_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numbers>
#include <ostream>

#include "bsdelab/errors.hpp"
#include "bsdelab/quadrature.hpp"

namespace bsdelab {

GridSpec GridSpec::padded(double pad) const {
    const int extra = static_cast<int>(std::ceil(pad / dx() - 1e-12));
    if (extra <= 0) return *this;
    GridSpec out = *this;
    out.x_min -= extra * dx();
    out.x_max += extra * dx();
    out.points += 2 * extra;
    return out;
}

GridFunction::GridFunction(const GridSpec& grid, int components)
    : grid_(grid), components_(components),
      values_(static_cast<std::size_t>(grid.points) * components, 0.0) {
    if (grid.points < 3) throw ConfigError("GridFunction: need at least 3 points");
    if (!(grid.x_max > grid.x_min)) throw ConfigError("GridFunction: empty domain");
}

GridFunction GridFunction::sample(const GridSpec& grid, int components,
                                  const std::function<void(double, std::span<double>)>& fn) {
    GridFunction g(grid, components);
    for (int i = 0; i < grid.points; ++i) {
        fn(grid.x(i), g.values_at(i));
    }
    g.compute_gradient();
    return g;
}

std::span<double> GridFunction::values_at(int i) {
    return {values_.data() + static_cast<std::size_t>(i) * components_,
            static_cast<std::size_t>(components_)};
}

std::span<const double> GridFunction::values_at(int i) const {
    return {values_.data() + static_cast<std::size_t>(i) * components_,
            static_cast<std::size_t>(components_)};
}

std::span<double> GridFunction::gradient_at_node(int i) {
    return {gradient_.data() + static_cast<std::size_t>(i) * components_,
            static_cast<std::size_t>(components_)};
}

std::span<const double> GridFunction::gradient_at_node(int i) const {
    return {gradient_.data() + static_cast<std::size_t>(i) * components_,
            static_cast<std::size_t>(components_)};
}

namespace {

// Piecewise-linear with boundary clamping; preserves the sup bound and the
// Lipschitz constant of the nodal data.
void interp(const GridSpec& grid, const std::vector<double>& layer, int m, double x,
            std::span<double> out) {
    const double dx = grid.dx();
    double s = (x - grid.x_min) / dx;
    if (s <= 0.0) {
        for (int c = 0; c < m; ++c) out[c] = layer[c];
        return;
    }
    if (s >= grid.points - 1) {
        const std::size_t off = static_cast<std::size_t>(grid.points - 1) * m;
        for (int c = 0; c < m; ++c) out[c] = layer[off + c];
        return;
    }
    const int i = static_cast<int>(s);
    const double w = s - i;
    const std::size_t off = static_cast<std::size_t>(i) * m;
    for (int c = 0; c < m; ++c) {
        out[c] = (1.0 - w) * layer[off + c] + w * layer[off + m + c];
    }
}

}  // namespace

void GridFunction::value(double x, std::span<double> out) const {
    interp(grid_, values_, components_, x, out);
}

void GridFunction::gradient(double x, std::span<double> out) const {
    if (!has_gradient()) throw ConfigError("GridFunction: gradient layer not computed");
    interp(grid_, gradient_, components_, x, out);
}

void GridFunction::second_derivative(double x, std::span<double> out) const {
    const double dx = grid_.dx();
    int i = static_cast<int>(std::lround((x - grid_.x_min) / dx));
    i = std::clamp(i, 1, grid_.points - 2);
    const auto lo = values_at(i - 1);
    const auto mid = values_at(i);
    const auto hi = values_at(i + 1);
    for (int c = 0; c < components_; ++c) {
        out[c] = (hi[c] - 2.0 * mid[c] + lo[c]) / (dx * dx);
    }
}

double GridFunction::sup_norm() const {
    double worst = 0.0;
    for (double v : values_) worst = std::max(worst, std::abs(v));
    return worst;
}

double GridFunction::sup_gradient_norm() const {
    double worst = 0.0;
    for (double v : gradient_) worst = std::max(worst, std::abs(v));
    return worst;
}

void GridFunction::compute_gradient() {
    const int n = grid_.points;
    const int m = components_;
    const double dx = grid_.dx();
    gradient_.assign(values_.size(), 0.0);
    for (int c = 0; c < m; ++c) {
        gradient_[c] = (values_[m + c] - values_[c]) / dx;
        const std::size_t last = static_cast<std::size_t>(n - 1) * m;
        gradient_[last + c] = (values_[last + c] - values_[last - m + c]) / dx;
    }
    for (int i = 1; i < n - 1; ++i) {
        const std::size_t off = static_cast<std::size_t>(i) * m;
        for (int c = 0; c < m; ++c) {
            gradient_[off + c] = (values_[off + m + c] - values_[off - m + c]) / (2.0 * dx);
        }
    }
}

void GridFunction::write_csv(std::ostream& os) const {
    os << "x";
    for (int c = 0; c < components_; ++c) os << ",u" << (c + 1);
    for (int c = 0; c < components_; ++c) os << ",du" << (c + 1);
    os << "\n";
    os.precision(17);
    for (int i = 0; i < grid_.points; ++i) {
        os << grid_.x(i);
        for (double v : values_at(i)) os << "," << v;
        if (has_gradient()) {
            for (double v : gradient_at_node(i)) os << "," << v;
        } else {
            for (int c = 0; c < components_; ++c) os << ",0";
        }
        os << "\n";
    }
}

GridFunctionFamily::GridFunctionFamily(std::vector<double> times,
                                       std::vector<GridFunction> snapshots)
    : times_(std::move(times)), snapshots_(std::move(snapshots)) {
    if (times_.size() != snapshots_.size() || times_.empty()) {
        throw ConfigError("GridFunctionFamily: times/snapshots mismatch");
    }
    for (std::size_t j = 1; j < times_.size(); ++j) {
        if (!(times_[j] > times_[j - 1])) {
            throw ConfigError("GridFunctionFamily: times must be strictly increasing");
        }
    }
}

void GridFunctionFamily::locate(double t, std::size_t& j0, std::size_t& j1,
                                double& w) const {
    if (t <= times_.front() + 1e-14) {
        j0 = j1 = 0;
        w = 0.0;
        return;
    }
    if (t >= times_.back() - 1e-14) {
        j0 = j1 = times_.size() - 1;
        w = 0.0;
        return;
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    j1 = static_cast<std::size_t>(it - times_.begin());
    j0 = j1 - 1;
    w = (t - times_[j0]) / (times_[j1] - times_[j0]);
}

void GridFunctionFamily::value(double x, double t, std::span<double> out) const {
    std::size_t j0, j1;
    double w;
    locate(t, j0, j1, w);
    snapshots_[j0].value(x, out);
    if (j1 != j0) {
        std::vector<double> hi(out.size());
        snapshots_[j1].value(x, hi);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = (1.0 - w) * out[c] + w * hi[c];
    }
}

void GridFunctionFamily::gradient(double x, double t, std::span<double> out) const {
    std::size_t j0, j1;
    double w;
    locate(t, j0, j1, w);
    snapshots_[j0].gradient(x, out);
    if (j1 != j0) {
        std::vector<double> hi(out.size());
        snapshots_[j1].gradient(x, hi);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = (1.0 - w) * out[c] + w * hi[c];
    }
}

double admissible_fd_dt(const CoefficientSet& coeffs, const GridSpec& grid) {
    const double dx = grid.dx();
    const double max_f = max_abs_f_on_range(coeffs, 512);
    double dt = 0.9 * dx * dx;
    if (max_f > 0.0) dt = std::min(dt, 0.9 * dx / max_f);
    return dt;
}

namespace {

struct FdMarch {
    const CoefficientSet* coeffs;
    GridSpec grid;
    int m;
    double dt;
    std::vector<double> sup0;  // per-component initial sup, for the max principle
    std::vector<double> u, unext, ux;

    void init() {
        const int n = grid.points;
        u.resize(static_cast<std::size_t>(n) * m);
        for (int i = 0; i < n; ++i) {
            coeffs->u0(grid.x(i), std::span<double>(u.data() + std::size_t(i) * m, m));
        }
        unext = u;
        ux.resize(u.size());
        sup0.assign(m, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < m; ++c) {
                sup0[c] = std::max(sup0[c], std::abs(u[std::size_t(i) * m + c]));
            }
        }
    }

    void step(double t) {
        const int n = grid.points;
        const double dx = grid.dx();
        const double inv2dx = 0.5 / dx;
        const double invdx2 = 1.0 / (dx * dx);
        // Mirror ghost nodes: u[-1] = u[1], u[n] = u[n-2] (zero gradient).
        for (int i = 0; i < n; ++i) {
            const int lo = (i == 0) ? 1 : i - 1;
            const int hi = (i == n - 1) ? n - 2 : i + 1;
            for (int c = 0; c < m; ++c) {
                ux[std::size_t(i) * m + c] =
                    (u[std::size_t(hi) * m + c] - u[std::size_t(lo) * m + c]) * inv2dx;
            }
        }
        std::vector<double> gval(m, 0.0);
        for (int i = 0; i < n; ++i) {
            const int lo = (i == 0) ? 1 : i - 1;
            const int hi = (i == n - 1) ? n - 2 : i + 1;
            const std::span<const double> ui(u.data() + std::size_t(i) * m, m);
            const std::span<const double> uxi(ux.data() + std::size_t(i) * m, m);
            const double fval = coeffs->f(ui, uxi);
            if (coeffs->has_g()) coeffs->g(t, ui, uxi, gval);
            for (int c = 0; c < m; ++c) {
                const double lap = (u[std::size_t(hi) * m + c] - 2.0 * ui[c] +
                                    u[std::size_t(lo) * m + c]) * invdx2;
                unext[std::size_t(i) * m + c] =
                    ui[c] + dt * (0.5 * lap - fval * uxi[c] + gval[c]);
            }
        }
        u.swap(unext);
        if (!coeffs->has_g()) {
            for (int i = 0; i < n; ++i) {
                for (int c = 0; c < m; ++c) {
                    if (std::abs(u[std::size_t(i) * m + c]) >
                        sup0[c] * (1.0 + 1e-10) + 1e-300) {
                        throw CheckError("solve_fd: discrete maximum principle violated; "
                                         "the configuration is outside the monotone regime "
                                         "(reduce dx)");
                    }
                }
            }
        }
    }
};

void check_cfl(const CoefficientSet& coeffs, const GridSpec& grid, double dt) {
    const double dx = grid.dx();
    const double max_f = max_abs_f_on_range(coeffs, 512);
    if (dt > 0.9 * dx * dx * (1.0 + 1e-12) ||
        (max_f > 0.0 && dt * max_f > 0.9 * dx * (1.0 + 1e-12))) {
        throw GuardError("solve_fd: CFL violated; admissible dt <= " +
                         std::to_string(admissible_fd_dt(coeffs, grid)));
    }
}

}  // namespace

GridFunction solve_fd(const CoefficientSet& coeffs, const GridSpec& grid, double t_final,
                      double dt_pde) {
    GridFunctionFamily fam = solve_fd_family(coeffs, grid, t_final, dt_pde, {t_final});
    return fam.snapshot(fam.size() - 1);
}

GridFunctionFamily solve_fd_family(const CoefficientSet& coeffs, const GridSpec& grid,
                                   double t_final, double dt_pde,
                                   const std::vector<double>& snapshot_times) {
    if (!(t_final >= 0.0)) throw ConfigError("solve_fd: negative final time");
    if (!(dt_pde > 0.0)) throw ConfigError("solve_fd: dt must be positive");
    if (snapshot_times.empty()) throw ConfigError("solve_fd: no snapshot times");
    if (t_final == 0.0) {
        GridFunction gf = GridFunction::sample(grid, coeffs.components, coeffs.u0);
        return GridFunctionFamily(snapshot_times, {gf});
    }
    check_cfl(coeffs, grid, dt_pde);
    std::vector<double> times = snapshot_times;
    std::sort(times.begin(), times.end());
    for (double t : times) {
        if (t < -1e-14 || t > t_final + 1e-12) {
            throw ConfigError("solve_fd: snapshot time outside [0, t_final]");
        }
    }

    const long steps = std::max<long>(1, std::lround(std::ceil(t_final / dt_pde - 1e-12)));
    const double dt = t_final / static_cast<double>(steps);

    FdMarch march{&coeffs, grid, coeffs.components, dt, {}, {}, {}, {}};
    march.init();

    std::vector<GridFunction> snaps;
    std::size_t next = 0;
    auto emit = [&](const std::vector<double>& a, const std::vector<double>& b, double w) {
        GridFunction gf(grid, coeffs.components);
        for (std::size_t j = 0; j < a.size(); ++j) {
            gf.data()[j] = (1.0 - w) * a[j] + w * b[j];
        }
        gf.compute_gradient();
        snaps.push_back(std::move(gf));
    };

    while (next < times.size() && times[next] <= 1e-14) {
        emit(march.u, march.u, 0.0);
        ++next;
    }
    std::vector<double> prev = march.u;
    for (long s = 0; s < steps; ++s) {
        const double t0 = s * dt;
        const double t1 = (s + 1) * dt;
        prev = march.u;
        march.step(t0);
        while (next < times.size() && times[next] <= t1 + 1e-12) {
            const double w = std::clamp((times[next] - t0) / dt, 0.0, 1.0);
            emit(prev, march.u, w);
            ++next;
        }
    }
    while (next < times.size()) {  // times pinned to t_final by rounding
        emit(march.u, march.u, 1.0);
        ++next;
    }
    return GridFunctionFamily(times, std::move(snaps));
}

// --- Cole-Hopf -------------------------------------------------------------

namespace {

// Antiderivative of u0 on [lo, hi], tabulated by per-interval Simpson and
// evaluated by cubic Hermite (the slope u0 is known exactly at the nodes).
class Potential {
public:
    Potential(const std::function<double(double)>& u0, double lo, double hi, int n = 4097)
        : lo_(lo), dy_((hi - lo) / (n - 1)), v_(n) {
        v_[0] = 0.0;
        slope_.resize(n);
        for (int i = 0; i < n; ++i) slope_[i] = u0(lo_ + i * dy_);
        for (int i = 0; i + 1 < n; ++i) {
            const double mid = u0(lo_ + (i + 0.5) * dy_);
            v_[i + 1] = v_[i] + dy_ / 6.0 * (slope_[i] + 4.0 * mid + slope_[i + 1]);
        }
    }

    double operator()(double y) const {
        const double s = (y - lo_) / dy_;
        const int i = std::clamp(static_cast<int>(s), 0, static_cast<int>(v_.size()) - 2);
        const double t = s - i;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * v_[i] + (t3 - 2 * t2 + t) * dy_ * slope_[i] +
               (-2 * t3 + 3 * t2) * v_[i + 1] + (t3 - t2) * dy_ * slope_[i + 1];
    }

private:
    double lo_, dy_;
    std::vector<double> v_, slope_;
};

struct ColeHopfSetup {
    Potential potential;
    double half_width;
    double e_shift;  // max of the kernel exponent, for overflow control
};

ColeHopfSetup cole_hopf_setup(const std::function<double(double)>& u0, double x,
                              double t, double support_scale, double extra_width) {
    const double w = std::max(8.0 * std::sqrt(t), extra_width) + support_scale +
                     std::abs(u0(x)) * t;
    Potential v(u0, x - w, x + w);
    double e_max = -1e300;
    for (int i = 0; i <= 512; ++i) {
        const double y = x - w + 2.0 * w * i / 512.0;
        e_max = std::max(e_max, -(x - y) * (x - y) / (2.0 * t) - v(y));
    }
    return {std::move(v), w, e_max};
}

}  // namespace

std::pair<double, double> cole_hopf_cross(const std::function<double(double)>& u0,
                                          double x, double t_final,
                                          double support_scale) {
    if (!(t_final > 0.0)) throw ConfigError("cole_hopf: need t > 0");
    const GaussHermite& gh = gauss_hermite(96);
    const double gh_reach = std::sqrt(2.0 * t_final) * std::abs(gh.nodes.front());
    ColeHopfSetup setup = cole_hopf_setup(u0, x, t_final, support_scale, gh_reach);
    const Potential& v = setup.potential;
    const double a = x - setup.half_width;
    const double b = x + setup.half_width;

    auto exponent = [&](double y) {
        return -(x - y) * (x - y) / (2.0 * t_final) - v(y) - setup.e_shift;
    };

    // Route 1: averaged initial data, adaptive Simpson.
    const double tol = 1e-10 * (b - a);
    const double den = adaptive_simpson([&](double y) { return std::exp(exponent(y)); },
                                        a, b, tol);
    const double num = adaptive_simpson(
        [&](double y) { return u0(y) * std::exp(exponent(y)); }, a, b, tol);
    const double simpson_value = num / den;

    // Route 2: kernel derivative against Gauss-Hermite nodes.
    const double scale = std::sqrt(2.0 * t_final);
    double num2 = 0.0, den2 = 0.0;
    double v_min = 1e300;
    for (double z : gh.nodes) v_min = std::min(v_min, v(x + scale * z));
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        const double z = gh.nodes[i];
        const double e = std::exp(-(v(x + scale * z) - v_min));
        den2 += gh.weights[i] * e;
        num2 += gh.weights[i] * z * e;
    }
    const double gauss_value = -std::sqrt(2.0 / t_final) * num2 / den2;

    return {simpson_value, gauss_value};
}

double cole_hopf(const std::function<double(double)>& u0, double x, double t_final,
                 double support_scale) {
    if (t_final == 0.0) return u0(x);
    return cole_hopf_cross(u0, x, t_final, support_scale).first;
}

// --- heat semigroup ---------------------------------------------------------

namespace {
std::atomic<std::size_t> g_clamp_count{0};
}

std::size_t heat_apply_clamp_count() { return g_clamp_count.load(); }

std::vector<double> heat_apply(const GridFunction& w, double s, double x) {
    const int m = w.components();
    std::vector<double> out(m, 0.0);
    if (s < 0.0) throw ConfigError("heat_apply: negative time");
    if (s == 0.0) {
        w.value(x, out);
        return out;
    }
    const GaussHermite& gh = gauss_hermite(64);
    const double scale = std::sqrt(2.0 * s);
    std::vector<double> buf(m);
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        const double xi = x + scale * gh.nodes[i];
        // Clamps only matter where the Gaussian weight is non-negligible.
        if (!w.inside(xi) && gh.weights[i] > 1e-12) ++clamped;
        w.value(xi, buf);
        for (int c = 0; c < m; ++c) out[c] += gh.weights[i] * buf[c];
    }
    const double inv = 1.0 / std::sqrt(std::numbers::pi);
    for (int c = 0; c < m; ++c) out[c] *= inv;
    if (clamped > 0) {
        g_clamp_count += clamped;
        std::cerr << "heat_apply: " << clamped
                  << " quadrature nodes clamped to the grid boundary\n";
    }
    return out;
}

double heat_apply(const std::function<double(double)>& w, double s, double x) {
    if (s < 0.0) throw ConfigError("heat_apply: negative time");
    return gaussian_expectation(w, x, s);
}

}  // namespace bsdelab
