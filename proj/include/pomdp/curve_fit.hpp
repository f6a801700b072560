#pragma once

#include <variant>
#include <vector>

#include "pomdp/exact_dp.hpp"
#include "pomdp/model.hpp"
#include "pomdp/pwlc.hpp"

namespace pomdp {

/// One linear function of the belief per action; V(b) = max_a Q(b,a).
struct LinearQModel {
    std::vector<std::vector<double>> weights;  ///< [action][state]

    int num_actions() const { return static_cast<int>(weights.size()); }
    double q(const Belief& b, int a) const { return dot(weights[a], b); }
    double operator()(const Belief& b) const;
    /// Action-tagged vectors, one per action.
    PwlcFn as_pwlc() const;
};

LinearQModel linear_q_from_pwlc(const PwlcFn& f, int num_actions);

/// V(b) = (sum_j (alpha_j . b)^k)^(1/k). Needs alpha_j . b > 0 wherever evaluated.
struct SoftmaxModel {
    std::vector<std::vector<double>> vectors;
    double k = 5.0;

    double operator()(const Belief& b) const;
};

inline constexpr double kDefaultSoftmaxK = 5.0;
/// Softmax coefficients are kept at or above this after every delta step, so
/// the model stays defined on the whole simplex.
inline constexpr double kSoftmaxFloor = 1e-6;

/**
 * `count` vectors copied round-robin from f, each copy scaled so that a group
 * of c copies sums back to the original k-th power, then jittered by a
 * relative factor in [1 - jitter, 1 + jitter].
 */
SoftmaxModel softmax_from_pwlc(const PwlcFn& f, int count, double k, Rng& rng, double jitter = 1e-3);

/// Throws std::domain_error on a nonpositive inner product.
double softmax_eval(const SoftmaxModel& mdl, const Belief& b);
/// d V / d alpha_j(s), laid out like mdl.vectors.
std::vector<std::vector<double>> softmax_gradient(const SoftmaxModel& mdl, const Belief& b);

/// w <- w - rate (f(b) - y) df/dw on the single function Q(., action).
void delta_step(LinearQModel& mdl, int action, const Belief& b, double y, double rate);
/// Projected: coefficients are clamped at kSoftmaxFloor afterwards.
void delta_step(SoftmaxModel& mdl, const Belief& b, double y, double rate);

/// rho(b,a) + gamma sum_o P(o|b,a) V(tau(b,a,o)) for every action.
std::vector<double> action_targets(const Pomdp& m, const ValueFn& value, const Belief& b);

struct LinearFit {
    LinearQModel model;
    bool rank_deficient = false;  ///< minimum-norm solution was used
};

/// Per-action least squares of the one-step targets on the samples.
LinearFit fit_linear_q(const Pomdp& m, const ValueFn& prev, const std::vector<Belief>& samples);

using FitModel = std::variant<LinearQModel, SoftmaxModel>;

double fit_value(const FitModel& mdl, const Belief& b);
ValueFn fit_value_fn(FitModel mdl);
/// Dot products charged per evaluation.
std::int64_t fit_value_cost(const FitModel& mdl);

enum class FitScheme { kSynchronous, kGaussSeidel };

/// Linearly decaying learning rate.
struct RateSchedule {
    double start = 0.2;
    double end = 0.001;

    double at(long step, long total) const;
};

struct FitConfig {
    FitScheme scheme = FitScheme::kSynchronous;
    int epochs = 10;
    RateSchedule rate;
    /// Delta-rule passes over the samples inside one synchronous epoch (softmax only).
    int sweeps = 50;
    std::vector<Belief> probes;
    /// Probe error is the mean |V - reference|; without one, the mean one-step Bellman residual.
    ValueFn reference;
};

struct FitResult {
    FitModel model;
    std::vector<double> probe_error;  ///< one entry per completed epoch
    int epochs_run = 0;
    bool diverged = false;
};

/**
 * Synchronous: each epoch freezes the model, computes targets from it and fits
 * a new one (normal equations for linear Q, decaying delta rule for softmax).
 * Gauss-Seidel: one live model updated sample by sample, the rate decaying over
 * the whole run. No convergence guarantee: non-finite or overflowing weights,
 * or a softmax inner product that turns nonpositive, stop the run with
 * `diverged` set and return the last finite model.
 */
FitResult fit_scheme(const Pomdp& m, const FitModel& init, const std::vector<Belief>& samples,
                     const FitConfig& cfg, Rng& rng);

/// Reward shift c making every rho + c >= 1, or 0 when all rho are already positive.
double softmax_reward_shift(const Pomdp& m);
/// Same model with every R(s,a,s') raised by c; values rise by c / (1 - gamma).
Pomdp shift_rewards(const Pomdp& m, double c);

}  // namespace pomdp
