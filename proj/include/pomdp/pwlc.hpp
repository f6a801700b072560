#pragma once

#include <span>
#include <vector>

#include "pomdp/model.hpp"

namespace pomdp {

/// Domination tolerance for pruning.
inline constexpr double kPruneTol = 1e-9;

/// Linear function over beliefs. `action` is the action that generated it
/// (-1 when untagged); `witnesses[o]` indexes the predecessor vector chosen
/// for observation o, when recorded.
struct AlphaVector {
    std::vector<double> coeffs;
    int action = -1;
    std::vector<int> witnesses;

    double value(const Belief& b) const { return dot(coeffs, b); }
};

/// Piecewise linear convex value function V(b) = max over vectors of alpha.b.
struct PwlcFn {
    std::vector<AlphaVector> vectors;

    std::size_t size() const { return vectors.size(); }
    bool empty() const { return vectors.empty(); }
    int num_states() const { return vectors.empty() ? 0 : static_cast<int>(vectors.front().coeffs.size()); }
    double operator()(const Belief& b) const;
};

struct PwlcEval {
    double value = 0.0;
    int index = -1;  ///< argmax, lowest index on ties
};

PwlcEval eval_pwlc(const PwlcFn& f, const Belief& b);

/// Single-vector function with the given constant value at every state.
PwlcFn constant_pwlc(int num_states, double value, int action = -1);

struct Domination {
    bool useful = false;
    Belief witness;  ///< maximizer of the margin LP (empty when `others` is empty)
    double margin = 0.0;
};

/**
 * Solves  max_{b in simplex, d}  d  s.t. (alpha - alpha').b >= d  for all alpha' in others.
 * `useful` is margin > tol. With no competitors the margin is +infinity.
 */
Domination dominates_lp(std::span<const double> alpha, std::span<const AlphaVector> others,
                        double tol = kPruneTol);

/// Drops vectors whose coefficients equal an earlier vector's (sup-norm <= 1e-12).
PwlcFn dedupe(const PwlcFn& f);

/// Drops vectors dominated coordinate-wise by another (first occurrence wins on equality).
PwlcFn remove_pointwise_dominated(const PwlcFn& f);

/// Duplicates, then pointwise-dominated, then LP-redundant vectors are removed.
PwlcFn prune(const PwlcFn& f, double tol = kPruneTol);

/// Exact sup_b (f(b) - g(b)) over the belief simplex.
double pwlc_sup_diff(const PwlcFn& f, const PwlcFn& g);

/// Exact sup-norm distance ||f - g||.
double pwlc_distance(const PwlcFn& f, const PwlcFn& g);

struct AccuracyBounds {
    double value_i = 0.0;        ///< ||V_i - V*|| given Bellman error eps
    double value_iminus1 = 0.0;  ///< ||V_{i-1} - V*||
    double lookahead_k = 0.0;    ///< loss of the k-step lookahead controller
    double direct = 0.0;         ///< loss of the direct controller
};

AccuracyBounds accuracy_bounds(double eps, double discount, int k);

/// Largest possible upper/lower bound gap after eps-convergence of both bounds.
double bound_gap_accuracy(double eps, double discount);

}  // namespace pomdp
