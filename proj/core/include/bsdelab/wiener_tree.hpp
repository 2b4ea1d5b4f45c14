#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bsdelab {

/// Exact discrete Wiener space: a non-recombining binary tree of depth N
/// over the horizon [0, T]. One Brownian step is +-h with h = sqrt(T/N).
///
/// Node addressing: (level k, path index p) with k in [0, N] and
/// p in [0, 2^k). The children of (k, p) are (k+1, 2p) for a down move
/// and (k+1, 2p+1) for an up move, so popcount(p) counts the up moves
/// along the path and B(k, p) = h * (2*popcount(p) - k).
class PathTree {
public:
    static constexpr int kMaxSteps = 24;  // 2^25-1 nodes; memory guard

    PathTree(int steps, double horizon);

    int steps() const { return steps_; }
    double horizon() const { return horizon_; }
    double dt() const { return dt_; }
    double step_width() const { return h_; }
    double time_at(int level) const { return level * dt_; }

    std::uint64_t nodes_at(int level) const { return std::uint64_t{1} << level; }
    std::uint64_t leaves() const { return nodes_at(steps_); }

    double brownian(int level, std::uint64_t node) const;

private:
    int steps_;
    double horizon_;
    double dt_;
    double h_;
};

/// Node-indexed values on a PathTree: one vector in R^m per node, stored
/// per level in node-major flat arrays. Adaptedness is enforced by the
/// storage layout (the value at a node can only depend on the path to it).
/// Processes defined on levels 0..N-1 (predictable integrands) simply
/// carry max_level = N-1.
class AdaptedProcess {
public:
    AdaptedProcess() = default;
    AdaptedProcess(const PathTree& tree, int components, int max_level);

    const PathTree& tree() const { return *tree_; }
    int components() const { return components_; }
    int max_level() const { return max_level_; }

    std::span<double> at(int level, std::uint64_t node);
    std::span<const double> at(int level, std::uint64_t node) const;
    double value(int level, std::uint64_t node, int comp = 0) const;

    std::vector<double>& level(int k) { return levels_[k]; }
    const std::vector<double>& level(int k) const { return levels_[k]; }

private:
    const PathTree* tree_ = nullptr;
    int components_ = 0;
    int max_level_ = -1;
    std::vector<std::vector<double>> levels_;
};

/// Leaf-indexed terminal data: 2^N vectors in R^m.
class TerminalVariable {
public:
    TerminalVariable() = default;
    TerminalVariable(const PathTree& tree, int components);

    const PathTree& tree() const { return *tree_; }
    int components() const { return components_; }

    std::span<double> at(std::uint64_t leaf);
    std::span<const double> at(std::uint64_t leaf) const;
    double value(std::uint64_t leaf, int comp = 0) const;

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    const PathTree* tree_ = nullptr;
    int components_ = 0;
    std::vector<double> data_;
};

/// A probability measure on the tree given by per-node up-probabilities.
/// Equivalence requires every branch probability to stay in (0, 1); the
/// symmetric measure (p_up = 1/2 everywhere) is stored implicitly.
class Measure {
public:
    enum class Kind { symmetric, tilted };

    static Measure symmetric(const PathTree& tree);
    static Measure tilted(const PathTree& tree, std::vector<std::vector<double>> up);

    const PathTree& tree() const { return *tree_; }
    Kind kind() const { return kind_; }

    double up_probability(int level, std::uint64_t node) const {
        return kind_ == Kind::symmetric ? 0.5 : up_[level][node];
    }

    /// Node occupation probabilities at a level (product of branch
    /// probabilities along the path).
    std::vector<double> node_probabilities(int level) const;

private:
    Measure(const PathTree& tree, Kind kind) : tree_(&tree), kind_(kind) {}

    const PathTree* tree_ = nullptr;
    Kind kind_;
    std::vector<std::vector<double>> up_;
};

// --- operations -----------------------------------------------------------

/// B itself as a scalar adapted process (levels 0..N).
AdaptedProcess brownian_process(const PathTree& tree);

/// Conditional expectation E[X | F_k] at every level 0..k under mu,
/// computed by measure-weighted backward induction. Exact.
AdaptedProcess cond_exp_all(const TerminalVariable& xi, const Measure& mu);

/// E[X | F_level] as a flat node-major array.
std::vector<double> cond_exp(const TerminalVariable& xi, int level, const Measure& mu);

/// Martingale-representation density Z with Z_k = (S_{k+1}^up - S_{k+1}^down) / (2h),
/// defined on levels 0..N-1. Verifies that S is a mu-martingale to mart_tol first.
AdaptedProcess martingale_density(const AdaptedProcess& s, const Measure& mu,
                                  double mart_tol = 1e-12);

/// Discrete stochastic integral sum_{j<k} Z_j * (W_{j+1} - W_j), forward
/// telescoping along each path; the integrator W must be scalar.
AdaptedProcess ito_sum(const AdaptedProcess& z, const AdaptedProcess& w);

/// Predictable bracket <S1^i, S2^i>_k = sum_{j<k} z1_j z2_j dt, componentwise.
AdaptedProcess bracket(const AdaptedProcess& s1, const AdaptedProcess& s2,
                       const Measure& mu);

/// Max over nodes and components of |X_k - E[X_{k+1} | F_k]|.
double martingale_defect(const AdaptedProcess& x, const Measure& mu);

/// E[X_level] per component under mu.
std::vector<double> level_expectation(const AdaptedProcess& x, int level, const Measure& mu);

/// E[xi] per component under mu.
std::vector<double> expectation(const TerminalVariable& xi, const Measure& mu);

/// sqrt(E|xi - eta|^2) under the symmetric measure (all components).
double l2_distance(const TerminalVariable& a, const TerminalVariable& b);
double l2_norm(const TerminalVariable& a);

}  // namespace bsdelab
