#include "bsdelab/coefficients.hpp"

#include <cmath>
#include <stdexcept>

#include "bsdelab/errors.hpp"

namespace bsdelab {

namespace {

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback, const std::string& catalog_name) {
    for (const auto& [k, v] : params) {
        if (k != key) {
            throw ConfigError("coefficients '" + catalog_name +
                              "': unknown parameter '" + k + "'");
        }
    }
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void require_no_params(const std::map<std::string, double>& params,
                       const std::string& catalog_name) {
    if (!params.empty()) {
        throw ConfigError("coefficients '" + catalog_name + "' takes no parameters");
    }
}

double gauss_bump(double x) { return std::exp(-0.5 * x * x); }

CoefficientSet gaussian_u0_base() {
    CoefficientSet c;
    c.components = 1;
    c.u0 = [](double x, std::span<double> out) { out[0] = gauss_bump(x); };
    c.u0_grad = [](double x, std::span<double> out) { out[0] = -x * gauss_bump(x); };
    c.u0_hess = [](double x, std::span<double> out) { out[0] = (x * x - 1.0) * gauss_bump(x); };
    c.lip_u0 = std::exp(-0.5);  // max |x e^{-x^2/2}| at x = 1
    c.sup_u0 = 1.0;
    c.sup_u0_comp = {1.0};
    c.c0 = 1.0;
    c.domain_scale = 4.0;
    return c;
}

CoefficientSet neg_tanh_u0_base() {
    CoefficientSet c;
    c.components = 1;
    c.u0 = [](double x, std::span<double> out) { out[0] = -std::tanh(x); };
    c.u0_grad = [](double x, std::span<double> out) {
        const double s = 1.0 / std::cosh(x);
        out[0] = -s * s;
    };
    c.u0_hess = [](double x, std::span<double> out) {
        const double s = 1.0 / std::cosh(x);
        out[0] = 2.0 * s * s * std::tanh(x);
    };
    c.lip_u0 = 1.0;
    c.sup_u0 = 1.0;
    c.sup_u0_comp = {1.0};
    c.c0 = 1.0;  // |u0''| <= 4/(3 sqrt 3) < 1
    c.domain_scale = 4.0;
    return c;
}

void zero_f(CoefficientSet& c) {
    const int m = c.components;
    c.f = [](std::span<const double>, std::span<const double>) { return 0.0; };
    c.f_grad = [m](std::span<const double>, std::span<double> out) {
        for (int i = 0; i < m; ++i) out[i] = 0.0;
    };
    c.f_hess = [m](std::span<const double>, std::span<double> out) {
        for (int i = 0; i < m * m; ++i) out[i] = 0.0;
    };
    c.lip_f = 0.0;
    c.c1 = 0.0;
}

}  // namespace

CoefficientSet coefficient_catalog(const std::string& name,
                                   const std::map<std::string, double>& params) {
    CoefficientSet c;
    if (name == "zero") {
        require_no_params(params, name);
        c = gaussian_u0_base();
        zero_f(c);
    } else if (name == "constant") {
        const double drift = get_param(params, "c", 1.0, name);
        c = gaussian_u0_base();
        zero_f(c);
        c.f = [drift](std::span<const double>, std::span<const double>) { return drift; };
    } else if (name == "burgers") {
        c = neg_tanh_u0_base();
        require_no_params(params, name);
        c.f = [](std::span<const double> y, std::span<const double>) { return y[0]; };
        c.f_grad = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
        c.f_hess = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
        c.lip_f = 1.0;
        c.c1 = 1.0;
    } else if (name == "tanh_clamped") {
        const double a = get_param(params, "a", 1.0, name);
        if (!(a > 0.0)) throw ConfigError("tanh_clamped: parameter a must be positive");
        c = neg_tanh_u0_base();
        c.f = [a](std::span<const double> y, std::span<const double>) {
            return a * std::tanh(y[0]);
        };
        c.f_grad = [a](std::span<const double> y, std::span<double> out) {
            const double s = 1.0 / std::cosh(y[0]);
            out[0] = a * s * s;
        };
        c.f_hess = [a](std::span<const double> y, std::span<double> out) {
            const double s = 1.0 / std::cosh(y[0]);
            out[0] = -2.0 * a * s * s * std::tanh(y[0]);
        };
        c.lip_f = a;
        c.c1 = 2.0 * a;  // third derivative of tanh peaks at 2
    } else if (name == "two_component_mix") {
        require_no_params(params, name);
        c.components = 2;
        c.u0 = [](double x, std::span<double> out) {
            out[0] = -std::tanh(x);
            out[1] = gauss_bump(x);
        };
        c.u0_grad = [](double x, std::span<double> out) {
            const double s = 1.0 / std::cosh(x);
            out[0] = -s * s;
            out[1] = -x * gauss_bump(x);
        };
        c.u0_hess = [](double x, std::span<double> out) {
            const double s = 1.0 / std::cosh(x);
            out[0] = 2.0 * s * s * std::tanh(x);
            out[1] = (x * x - 1.0) * gauss_bump(x);
        };
        c.f = [](std::span<const double> y, std::span<const double>) {
            return 0.5 * (y[0] + y[1]);
        };
        c.f_grad = [](std::span<const double>, std::span<double> out) {
            out[0] = 0.5;
            out[1] = 0.5;
        };
        c.f_hess = [](std::span<const double>, std::span<double> out) {
            for (int i = 0; i < 4; ++i) out[i] = 0.0;
        };
        c.lip_u0 = 1.0;
        c.sup_u0 = 1.0;
        c.sup_u0_comp = {1.0, 1.0};
        c.lip_f = std::sqrt(0.5);
        c.c0 = 1.05;  // |u0''| peaks at ~1.0204 near x = 0.3
        c.c1 = std::sqrt(0.5);
        c.domain_scale = 4.0;
    } else {
        throw ConfigError("unknown coefficient catalog entry '" + name +
                          "'; known: zero, constant, burgers, tanh_clamped, "
                          "two_component_mix");
    }
    c.name = name;
    certify(c);
    return c;
}

namespace {

double vec_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double a : v) acc += a * a;
    return std::sqrt(acc);
}

// Axis-sample points of the box prod [-sup_i, sup_i].
std::vector<double> axis_points(double bound, int n) {
    std::vector<double> pts(n);
    for (int i = 0; i < n; ++i) {
        pts[i] = -bound + 2.0 * bound * i / (n - 1);
    }
    return pts;
}

template <typename Fn>
void for_each_box_point(const CoefficientSet& c, int n, Fn&& fn) {
    if (c.components > 2) {
        throw ConfigError("box sampling supports m <= 2 components");
    }
    if (c.components == 1) {
        for (double y0 : axis_points(c.sup_u0_comp[0], n)) {
            const double y[1] = {y0};
            fn(std::span<const double>(y, 1));
        }
    } else {
        const auto a0 = axis_points(c.sup_u0_comp[0], n);
        const auto a1 = axis_points(c.sup_u0_comp[1], n);
        for (double y0 : a0) {
            for (double y1 : a1) {
                const double y[2] = {y0, y1};
                fn(std::span<const double>(y, 2));
            }
        }
    }
}

}  // namespace

void certify(const CoefficientSet& c) {
    constexpr double kTol = 1e-9;
    const int m = c.components;
    const double span_x = c.domain_scale + 2.0;
    const int n = 2001;
    std::vector<double> a(m), b(m), deriv(m);

    // u0: Lipschitz quotient, sup bounds, flow derivative bounds.
    double prev_x = -span_x;
    c.u0(prev_x, a);
    for (int i = 1; i < n; ++i) {
        const double x = -span_x + 2.0 * span_x * i / (n - 1);
        c.u0(x, b);
        double diff = 0.0;
        for (int j = 0; j < m; ++j) diff += (b[j] - a[j]) * (b[j] - a[j]);
        const double quotient = std::sqrt(diff) / (x - prev_x);
        if (quotient > c.lip_u0 * (1.0 + kTol) + kTol) {
            throw CheckError("certify(" + c.name + "): sampled u0 Lipschitz quotient " +
                             std::to_string(quotient) + " exceeds declared " +
                             std::to_string(c.lip_u0));
        }
        for (int j = 0; j < m; ++j) {
            if (std::abs(b[j]) > c.sup_u0_comp[j] * (1.0 + kTol)) {
                throw CheckError("certify(" + c.name + "): |u0| bound violated");
            }
        }
        if (c.c0 > 0.0) {
            for (auto* fn : {&c.u0, &c.u0_grad, &c.u0_hess}) {
                (*fn)(x, deriv);
                if (vec_norm(deriv) > c.c0 * (1.0 + kTol)) {
                    throw CheckError("certify(" + c.name + "): flow bound C0 violated");
                }
            }
        }
        a = b;
        prev_x = x;
    }

    // f: Lipschitz quotient along each axis on the range box, flow bounds.
    const int nf = 201;
    std::vector<double> grad(m), hess(m * m), hess2(m * m);
    const std::vector<double> zero_z(m, 0.0);
    for_each_box_point(c, nf, [&](std::span<const double> y) {
        std::vector<double> yp(y.begin(), y.end());
        const double base = c.f(y, zero_z);
        const double step = 1e-3;
        for (int j = 0; j < m; ++j) {
            yp[j] += step;
            const double quotient = std::abs(c.f(yp, zero_z) - base) / step;
            yp[j] = y[j];
            if (quotient > c.lip_f * (1.0 + kTol) + kTol) {
                throw CheckError("certify(" + c.name + "): sampled f Lipschitz quotient " +
                                 std::to_string(quotient) + " exceeds declared " +
                                 std::to_string(c.lip_f));
            }
        }
        if (c.c1 > 0.0 || c.lip_f > 0.0) {
            c.f_grad(y, grad);
            c.f_hess(y, hess);
            const double bound = std::max(c.c1, c.lip_f) * (1.0 + kTol) + kTol;
            if (vec_norm(grad) > bound || vec_norm(hess) > bound) {
                throw CheckError("certify(" + c.name + "): flow bound C1 violated");
            }
            // Third derivative via centered difference of the Hessian.
            for (int j = 0; j < m; ++j) {
                yp[j] = y[j] + step;
                c.f_hess(yp, hess);
                yp[j] = y[j] - step;
                c.f_hess(yp, hess2);
                yp[j] = y[j];
                for (int e = 0; e < m * m; ++e) {
                    const double third = (hess[e] - hess2[e]) / (2.0 * step);
                    if (std::abs(third) > bound + 1e-4) {
                        throw CheckError("certify(" + c.name +
                                         "): flow bound C1 violated by third derivative");
                    }
                }
            }
        }
    });
}

double max_abs_f_on_range(const CoefficientSet& c, int samples_per_axis) {
    double worst = 0.0;
    const std::vector<double> zero_z(c.components, 0.0);
    for_each_box_point(c, samples_per_axis, [&](std::span<const double> y) {
        worst = std::max(worst, std::abs(c.f(y, zero_z)));
    });
    return worst;
}

double max_f_squared_on_range(const CoefficientSet& c, int samples_per_axis) {
    const double worst = max_abs_f_on_range(c, samples_per_axis);
    return worst * worst;
}

}  // namespace bsdelab
