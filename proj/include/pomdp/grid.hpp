#pragma once

#include <utility>
#include <vector>

#include "pomdp/mdp.hpp"
#include "pomdp/model.hpp"

namespace pomdp {

/// Two beliefs closer than this in max-norm are the same grid point.
inline constexpr double kGridDupTol = 1e-12;
/// Membership tolerance used when growing a grid along simulated trajectories.
inline constexpr double kGridMemberTol = 1e-9;

/// Set of beliefs with cached sparse supports.
class Grid {
public:
    Grid() = default;
    explicit Grid(int num_states) : n_(num_states), extreme_(static_cast<std::size_t>(num_states), -1) {}
    Grid(int num_states, const std::vector<Belief>& points);

    /// Grid holding exactly the |S| extreme beliefs, extreme s at index s.
    static Grid extremes(int num_states);

    int num_states() const { return n_; }
    int size() const { return static_cast<int>(points_.size()); }
    const Belief& point(int j) const { return points_[j]; }
    const std::vector<Belief>& points() const { return points_; }
    /// (s, b_j(s)) for b_j(s) > 0.
    const std::vector<std::pair<int, double>>& support(int j) const { return support_[j]; }

    bool contains_extremes() const;
    /// Index of the extreme e_s, or -1.
    int extreme_index(int s) const { return extreme_[s]; }
    /// Index of a point within `tol` (max-norm) of b, or -1.
    int find(const Belief& b, double tol = kGridDupTol) const;

    /// Appends b unless it duplicates an existing point; returns its index.
    int add(const Belief& b);

private:
    int n_ = 0;
    std::vector<Belief> points_;
    std::vector<std::vector<std::pair<int, double>>> support_;
    std::vector<int> extreme_;
};

enum class GridRule { kNearest, kKernel, kSawtooth, kLp };

const char* grid_rule_name(GridRule r);
GridRule parse_grid_rule(const std::string& name);

/// Sparse convex combination: (grid index, weight).
using InterpWeights = std::vector<std::pair<int, double>>;

/// Grid values plus the rule used to extend them to arbitrary beliefs.
struct GridValueFn {
    Grid grid;
    std::vector<double> values;
    GridRule rule = GridRule::kSawtooth;
    double sigma = 0.25;  ///< kernel width

    double operator()(const Belief& b) const;
};

double nn_eval(const GridValueFn& g, const Belief& b);
double kernel_eval(const GridValueFn& g, const Belief& b);
/// Minimum over the pure-extremes interpolation and every interior point's
/// interpolation with the extremes. Needs all extremes in the grid.
double sawtooth_eval(const GridValueFn& g, const Belief& b);

struct LpInterp {
    double value = 0.0;
    std::vector<double> lambda;  ///< one weight per grid point
};

/// min sum_j lambda_j phi_j over convex weights reproducing b.
LpInterp best_interp_lp(const Grid& grid, const std::vector<double>& values, const Belief& b);

/// Weights the rule assigns to b; value(b) = sum weight * phi.
InterpWeights interp_weights(const GridValueFn& g, const Belief& b);

/// Successor beliefs of grid points, cached for repeated backups.
struct GridSuccessors {
    struct Branch {
        int obs;
        double prob;  ///< P(o | b_j, a)
        Belief next;
    };
    int num_actions = 0;
    /// branches[j * num_actions + a], impossible observations omitted.
    std::vector<std::vector<Branch>> branches;
    /// rewards[j * num_actions + a] = rho(b_j, a).
    std::vector<double> rewards;

    const std::vector<Branch>& at(int j, int a) const { return branches[static_cast<std::size_t>(j) * num_actions + a]; }
};

GridSuccessors grid_successors(const Pomdp& m, const Grid& grid);

/// Extends cached successors with any points appended to the grid since.
void extend_successors(const Pomdp& m, const Grid& grid, GridSuccessors& succ);

/// phi'(b_j) = max_a [rho(b_j,a) + discount * sum_o P(o|b_j,a) g(tau(b_j,a,o))].
std::vector<double> grid_backup(const Pomdp& m, const GridValueFn& g);
std::vector<double> grid_backup(const Pomdp& m, const GridValueFn& g, const GridSuccessors& succ);

/// Fixed interpolation weights per (j, a, branch), parallel to GridSuccessors::branches.
struct InterpTable {
    int num_actions = 0;
    std::vector<std::vector<InterpWeights>> weights;
};

/// Weights of every successor belief under the rule of g (values matter for sawtooth and LP).
InterpTable build_interp_table(const GridValueFn& g, const GridSuccessors& succ);

/// Finite MDP over grid points: P(b_k | b_j, a) = sum_o P(o|b_j,a) lambda_{j,a,o,k}.
/// Throws ValidationError unless every weight row is a convex combination.
FiniteMdp to_grid_mdp(const Pomdp& m, const Grid& grid, const GridSuccessors& succ, const InterpTable& table);

struct SawtoothResult {
    GridValueFn fn;
    int rounds = 0;
    double last_change = 0.0;
    bool converged = false;
};

/**
 * Alternates between fixing the minimizing interpolation of every successor
 * belief and solving the induced grid MDP. Without `warm_start` the grid
 * values start from sum_s b_j(s) V_MDP(s). `succ` may be passed to reuse
 * cached successors; it is extended to the grid when stale.
 */
SawtoothResult solve_sawtooth(const Pomdp& m, const Grid& grid, double eps, int max_rounds,
                              const std::vector<double>* warm_start = nullptr, GridSuccessors* succ = nullptr);

struct ExpandResult {
    std::vector<Belief> points;
    int skipped = 0;  ///< extremes whose trajectory hit the step cap
};

/**
 * From every extreme belief, follows the greedy lookahead action under g
 * with sampled observations until the belief leaves the grid (and the points
 * already found), then records it.
 */
ExpandResult adaptive_expand(const Pomdp& m, const GridValueFn& g, Rng& rng, int max_steps = 1000);

struct AdaptiveGridResult {
    GridValueFn fn;
    int added = 0;
    int skipped = 0;
    std::vector<double> mean_history;  ///< optional bound-quality trace per increment
};

/**
 * Starts from the extremes, solves, and repeatedly grows the grid by
 * `increment` points (calling adaptive_expand as often as needed), warm
 * starting each solve from the previous values, until `total` points were added.
 */
AdaptiveGridResult adaptive_sawtooth(const Pomdp& m, int total, int increment, double eps, int max_rounds, Rng& rng,
                                     const std::vector<Belief>* probe = nullptr);

}  // namespace pomdp
