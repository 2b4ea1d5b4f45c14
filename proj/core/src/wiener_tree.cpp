#include "bsdelab/wiener_tree.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>

#include "bsdelab/errors.hpp"

namespace bsdelab {

PathTree::PathTree(int steps, double horizon)
    : steps_(steps), horizon_(horizon) {
    if (steps < 1 || steps > kMaxSteps) {
        throw CapacityError("PathTree: steps must be in [1, " +
                            std::to_string(kMaxSteps) + "], got " +
                            std::to_string(steps));
    }
    if (!(horizon > 0.0)) {
        throw ConfigError("PathTree: horizon must be positive");
    }
    dt_ = horizon_ / steps_;
    h_ = std::sqrt(dt_);
}

double PathTree::brownian(int level, std::uint64_t node) const {
    const int ups = std::popcount(node);
    return h_ * (2 * ups - level);
}

AdaptedProcess::AdaptedProcess(const PathTree& tree, int components, int max_level)
    : tree_(&tree), components_(components), max_level_(max_level) {
    levels_.resize(max_level + 1);
    for (int k = 0; k <= max_level; ++k) {
        levels_[k].assign(tree.nodes_at(k) * components, 0.0);
    }
}

std::span<double> AdaptedProcess::at(int level, std::uint64_t node) {
    return {levels_[level].data() + node * components_,
            static_cast<std::size_t>(components_)};
}

std::span<const double> AdaptedProcess::at(int level, std::uint64_t node) const {
    return {levels_[level].data() + node * components_,
            static_cast<std::size_t>(components_)};
}

double AdaptedProcess::value(int level, std::uint64_t node, int comp) const {
    return levels_[level][node * components_ + comp];
}

TerminalVariable::TerminalVariable(const PathTree& tree, int components)
    : tree_(&tree), components_(components),
      data_(tree.leaves() * components, 0.0) {}

std::span<double> TerminalVariable::at(std::uint64_t leaf) {
    return {data_.data() + leaf * components_,
            static_cast<std::size_t>(components_)};
}

std::span<const double> TerminalVariable::at(std::uint64_t leaf) const {
    return {data_.data() + leaf * components_,
            static_cast<std::size_t>(components_)};
}

double TerminalVariable::value(std::uint64_t leaf, int comp) const {
    return data_[leaf * components_ + comp];
}

Measure Measure::symmetric(const PathTree& tree) {
    return Measure(tree, Kind::symmetric);
}

Measure Measure::tilted(const PathTree& tree, std::vector<std::vector<double>> up) {
    Measure mu(tree, Kind::tilted);
    if (up.size() != static_cast<std::size_t>(tree.steps())) {
        throw ConfigError("Measure: need one probability layer per step");
    }
    for (int k = 0; k < tree.steps(); ++k) {
        if (up[k].size() != tree.nodes_at(k)) {
            throw ConfigError("Measure: layer " + std::to_string(k) + " has wrong size");
        }
        for (double q : up[k]) {
            if (!(q > 0.0 && q < 1.0)) {
                throw GuardError("Measure: branch probability outside (0,1); "
                                 "measures must stay equivalent");
            }
        }
    }
    mu.up_ = std::move(up);
    return mu;
}

std::vector<double> Measure::node_probabilities(int level) const {
    std::vector<double> probs{1.0};
    for (int k = 0; k < level; ++k) {
        std::vector<double> next(tree_->nodes_at(k + 1));
        for (std::uint64_t p = 0; p < tree_->nodes_at(k); ++p) {
            const double q = up_probability(k, p);
            next[2 * p] = probs[p] * (1.0 - q);
            next[2 * p + 1] = probs[p] * q;
        }
        probs = std::move(next);
    }
    return probs;
}

AdaptedProcess brownian_process(const PathTree& tree) {
    AdaptedProcess b(tree, 1, tree.steps());
    for (int k = 0; k <= tree.steps(); ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            b.level(k)[p] = tree.brownian(k, p);
        }
    }
    return b;
}

namespace {

void check_same_tree(const PathTree& a, const PathTree& b, const char* what) {
    if (&a != &b) {
        throw ConfigError(std::string(what) + ": arguments live on different trees");
    }
}

// One backward halving step: values at level k+1 -> E[. | F_k].
void project_level(const Measure& mu, int k, int m,
                   const std::vector<double>& fine, std::vector<double>& coarse) {
    const std::uint64_t n = mu.tree().nodes_at(k);
    coarse.resize(n * m);
    for (std::uint64_t p = 0; p < n; ++p) {
        const double q = mu.up_probability(k, p);
        for (int i = 0; i < m; ++i) {
            coarse[p * m + i] = (1.0 - q) * fine[(2 * p) * m + i] +
                                q * fine[(2 * p + 1) * m + i];
        }
    }
}

}  // namespace

AdaptedProcess cond_exp_all(const TerminalVariable& xi, const Measure& mu) {
    check_same_tree(xi.tree(), mu.tree(), "cond_exp");
    const PathTree& tree = xi.tree();
    const int m = xi.components();
    AdaptedProcess y(tree, m, tree.steps());
    y.level(tree.steps()) = xi.data();
    for (int k = tree.steps() - 1; k >= 0; --k) {
        project_level(mu, k, m, y.level(k + 1), y.level(k));
    }
    return y;
}

std::vector<double> cond_exp(const TerminalVariable& xi, int level, const Measure& mu) {
    check_same_tree(xi.tree(), mu.tree(), "cond_exp");
    const PathTree& tree = xi.tree();
    if (level < 0 || level > tree.steps()) {
        throw ConfigError("cond_exp: level out of range");
    }
    std::vector<double> v = xi.data();
    std::vector<double> next;
    for (int k = tree.steps() - 1; k >= level; --k) {
        project_level(mu, k, xi.components(), v, next);
        v.swap(next);
    }
    return v;
}

double martingale_defect(const AdaptedProcess& x, const Measure& mu) {
    check_same_tree(x.tree(), mu.tree(), "martingale_defect");
    const PathTree& tree = x.tree();
    const int m = x.components();
    double worst = 0.0;
    for (int k = 0; k < x.max_level(); ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            const double q = mu.up_probability(k, p);
            for (int i = 0; i < m; ++i) {
                const double mean = (1.0 - q) * x.value(k + 1, 2 * p, i) +
                                    q * x.value(k + 1, 2 * p + 1, i);
                worst = std::max(worst, std::abs(x.value(k, p, i) - mean));
            }
        }
    }
    return worst;
}

AdaptedProcess martingale_density(const AdaptedProcess& s, const Measure& mu,
                                  double mart_tol) {
    check_same_tree(s.tree(), mu.tree(), "martingale_density");
    const PathTree& tree = s.tree();
    if (s.max_level() != tree.steps()) {
        throw ConfigError("martingale_density: process must reach the terminal level");
    }
    const double defect = martingale_defect(s, mu);
    if (defect > mart_tol) {
        throw CheckError("martingale_density: input is not a martingale under the "
                         "given measure (defect " + std::to_string(defect) + ")");
    }
    const int m = s.components();
    const double two_h = 2.0 * tree.step_width();
    AdaptedProcess z(tree, m, tree.steps() - 1);
    for (int k = 0; k < tree.steps(); ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            for (int i = 0; i < m; ++i) {
                z.at(k, p)[i] = (s.value(k + 1, 2 * p + 1, i) -
                                 s.value(k + 1, 2 * p, i)) / two_h;
            }
        }
    }
    return z;
}

AdaptedProcess ito_sum(const AdaptedProcess& z, const AdaptedProcess& w) {
    check_same_tree(z.tree(), w.tree(), "ito_sum");
    const PathTree& tree = z.tree();
    if (w.components() != 1) {
        throw ConfigError("ito_sum: integrator must be scalar");
    }
    if (z.max_level() < tree.steps() - 1 || w.max_level() != tree.steps()) {
        throw ConfigError("ito_sum: integrand on levels 0..N-1, integrator on 0..N");
    }
    const int m = z.components();
    AdaptedProcess out(tree, m, tree.steps());
    for (int k = 0; k < tree.steps(); ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            for (std::uint64_t c = 2 * p; c <= 2 * p + 1; ++c) {
                const double dw = w.value(k + 1, c) - w.value(k, p);
                for (int i = 0; i < m; ++i) {
                    out.at(k + 1, c)[i] = out.value(k, p, i) + z.value(k, p, i) * dw;
                }
            }
        }
    }
    return out;
}

AdaptedProcess bracket(const AdaptedProcess& s1, const AdaptedProcess& s2,
                       const Measure& mu) {
    check_same_tree(s1.tree(), s2.tree(), "bracket");
    if (s1.components() != s2.components()) {
        throw ConfigError("bracket: component mismatch");
    }
    const PathTree& tree = s1.tree();
    const AdaptedProcess z1 = martingale_density(s1, mu);
    const AdaptedProcess z2 = martingale_density(s2, mu);
    const int m = s1.components();
    const double dt = tree.dt();
    AdaptedProcess out(tree, m, tree.steps());
    for (int k = 0; k < tree.steps(); ++k) {
        for (std::uint64_t p = 0; p < tree.nodes_at(k); ++p) {
            for (std::uint64_t c = 2 * p; c <= 2 * p + 1; ++c) {
                for (int i = 0; i < m; ++i) {
                    out.at(k + 1, c)[i] =
                        out.value(k, p, i) + z1.value(k, p, i) * z2.value(k, p, i) * dt;
                }
            }
        }
    }
    return out;
}

std::vector<double> level_expectation(const AdaptedProcess& x, int level, const Measure& mu) {
    check_same_tree(x.tree(), mu.tree(), "level_expectation");
    const int m = x.components();
    std::vector<double> mean(m, 0.0);
    if (mu.kind() == Measure::Kind::symmetric) {
        const double w = 1.0 / static_cast<double>(x.tree().nodes_at(level));
        for (std::uint64_t p = 0; p < x.tree().nodes_at(level); ++p) {
            for (int i = 0; i < m; ++i) mean[i] += x.value(level, p, i);
        }
        for (int i = 0; i < m; ++i) mean[i] *= w;
        return mean;
    }
    const std::vector<double> probs = mu.node_probabilities(level);
    for (std::uint64_t p = 0; p < x.tree().nodes_at(level); ++p) {
        for (int i = 0; i < m; ++i) mean[i] += probs[p] * x.value(level, p, i);
    }
    return mean;
}

std::vector<double> expectation(const TerminalVariable& xi, const Measure& mu) {
    return cond_exp(xi, 0, mu);
}

double l2_distance(const TerminalVariable& a, const TerminalVariable& b) {
    check_same_tree(a.tree(), b.tree(), "l2_distance");
    const double w = 1.0 / static_cast<double>(a.tree().leaves());
    double acc = 0.0;
    for (std::size_t j = 0; j < a.data().size(); ++j) {
        const double d = a.data()[j] - b.data()[j];
        acc += d * d;
    }
    return std::sqrt(acc * w);
}

double l2_norm(const TerminalVariable& a) {
    const double w = 1.0 / static_cast<double>(a.tree().leaves());
    double acc = 0.0;
    for (double v : a.data()) acc += v * v;
    return std::sqrt(acc * w);
}

}  // namespace bsdelab
