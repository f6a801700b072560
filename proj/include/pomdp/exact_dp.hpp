#pragma once

#include <functional>
#include <vector>

#include "pomdp/model.hpp"
#include "pomdp/ops.hpp"
#include "pomdp/pwlc.hpp"

namespace pomdp {

/// Any evaluable value function over beliefs.
using ValueFn = std::function<double(const Belief&)>;

struct BackupOptions {
    std::size_t max_candidates = 1'000'000;
    double prune_tol = kPruneTol;
};

/**
 * Exact dynamic-programming update of a PWLC function.
 *
 * Per action, builds the per-observation projected sets and combines them
 * with cross-sums, pruning after every step. Each output vector carries its
 * action and, for every observation, the index of the vector of `f` it was
 * built from. Throws ResourceError when an intermediate cross-sum would
 * exceed `max_candidates`.
 */
PwlcFn exact_backup(const Pomdp& m, const PwlcFn& f, const BackupOptions& opts = {});

/// Default starting point: the single vector min_{s,a} rho(s,a) / (1 - discount).
PwlcFn default_initial_pwlc(const Pomdp& m);

struct ValueIterationResult {
    PwlcFn f;
    double bellman_error = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Iterates f_1..f_n when requested (f_0 excluded).
    std::vector<PwlcFn> history;
};

/// Repeats exact_backup until the exact sup-norm change is <= eps or
/// `max_iters` backups were done. A candidate-cap hit ends the run early
/// with converged = false.
ValueIterationResult value_iteration(const Pomdp& m, const PwlcFn& f0, double eps, int max_iters,
                                     const BackupOptions& opts = {}, bool keep_history = false);

struct ActionChoice {
    int action = 0;
    double value = 0.0;
};

/// One-step lookahead on V; impossible observations contribute nothing, ties
/// go to the lowest action.
ActionChoice lookahead_action(const Pomdp& m, const ValueFn& value, const Belief& b,
                              OpCounter* ops = nullptr);

/// Action tag of the maximizing vector. Throws ValidationError when untagged.
int direct_action(const PwlcFn& f, const Belief& b);

struct PolicyNode {
    int action = 0;
    std::vector<int> next;  ///< per observation; -1 = terminal (no cycle closure)
    int stage = 0;          ///< 0 for the oldest stage
    std::vector<double> coeffs;
};

struct PolicyGraph {
    std::vector<PolicyNode> nodes;
    bool cycle_closed = false;

    /// Greedy start node: best node of the newest stage at b (lowest id on ties).
    int start_node(const Belief& b) const;
    int newest_stage() const;
};

/// Builds the policy graph from successive backups (history[0] oldest). Each
/// stage's witnesses must index into the previous stage; the oldest stage's
/// nodes self-loop on every observation when `close_cycle` is set.
PolicyGraph extract_policy_graph(const std::vector<PwlcFn>& history, bool close_cycle = true);

}  // namespace pomdp
