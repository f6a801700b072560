#pragma once

#include <memory>
#include <vector>

#include "pomdp/exact_dp.hpp"
#include "pomdp/model.hpp"
#include "pomdp/policy.hpp"
#include "pomdp/pwlc.hpp"

namespace pomdp {

/// Deterministic finite-state controller: memory state x emits action[x] and
/// moves to next[x][o] after observation o. `values[x][s]` holds V(x,s)
/// once evaluated.
struct FsmController {
    std::vector<int> action;
    std::vector<std::vector<int>> next;
    std::vector<std::vector<double>> values;

    int size() const { return static_cast<int>(action.size()); }
    bool evaluated() const { return !values.empty(); }
};

/// Throws ValidationError unless the controller is total and consistent with m.
void validate_fsm(const Pomdp& m, const FsmController& c);

/// |M| = 1, emits `action`, self-loops on every observation.
FsmController make_one_action_fsm(const Pomdp& m, int action);

/// Linear systems with more unknowns than this are solved iteratively.
inline constexpr int kDenseFsmLimit = 5000;

/// Returns a copy of c with V(x,s) solving (I - discount P_C) v = r_C.
FsmController evaluate_fsm(const Pomdp& m, const FsmController& c, int dense_limit = kDenseFsmLimit);

/// max-norm of (I - discount P_C) v - r_C for the stored values.
double fsm_residual(const Pomdp& m, const FsmController& c);

struct FsmValue {
    double value = 0.0;
    int start = 0;  ///< greedy memory state, lowest index on ties
};

/// max_x V(x,b). Throws ValidationError on an unevaluated controller.
FsmValue fsm_value(const FsmController& c, const Belief& b);

/// The vectors V(x,.) tagged with action[x] and witnesses next[x].
PwlcFn fsm_pwlc(const FsmController& c);

/// Fixed-strategy update: vector x becomes
/// rho(.,action[x]) + discount * sum_o P(.,o|.,action[x]) f[next[x][o]].
PwlcFn h_fsm_update(const Pomdp& m, const FsmController& c, const PwlcFn& f);

/**
 * One round of policy improvement. Every vector of the exact backup of
 * {V(x,.)} becomes a memory state unless it equals an existing one; old
 * states pointwise dominated by a new state are dropped and their inbound
 * links redirected to it. The result is evaluated.
 */
FsmController hansen_improve(const Pomdp& m, const FsmController& c, const BackupOptions& opts = {});

struct PolicyIterationResult {
    FsmController controller;
    int rounds = 0;
    double last_gain = 0.0;  ///< max improvement over the extreme beliefs in the last round
    bool hit_cap = false;
};

/// Improves until the gain at every extreme belief is below eps, `max_rounds`
/// is reached, or the controller grows past `max_states`.
PolicyIterationResult policy_iteration(const Pomdp& m, const FsmController& c0, double eps, int max_rounds,
                                       int max_states = 2000, const BackupOptions& opts = {});

/// Runs the machine from the greedy start state without tracking beliefs.
class FsmModePolicy : public Policy {
public:
    explicit FsmModePolicy(FsmController c);

    std::string name() const override { return "fsm"; }
    bool tracks_belief() const override { return false; }
    void reset(const Belief& b0, OpCounter& ops) override;
    int act(OpCounter& ops) override;
    void observe(int action, int obs, OpCounter& ops) override;

    int memory_state() const { return state_; }

private:
    FsmController c_;
    int state_ = 0;
};

/// Re-selects the greedy memory state from the tracked belief at every step.
std::unique_ptr<Policy> make_fsm_direct_policy(const Pomdp& m, const FsmController& c);
/// One-step lookahead on max_x V(x,b).
std::unique_ptr<Policy> make_fsm_lookahead_policy(const Pomdp& m, const FsmController& c);

}  // namespace pomdp
