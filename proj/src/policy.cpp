#include "pomdp/policy.hpp"

#include "pomdp/errors.hpp"

namespace pomdp {

void BeliefPolicy::reset(const Belief& b0, OpCounter&) {
    validate_belief(b0, model_.num_states());
    belief_ = b0;
}

void BeliefPolicy::observe(int action, int obs, OpCounter& ops) {
    Belief pred = predict(model_, belief_, action);
    ++ops.belief_updates;
    if (!belief_update_from_prediction(model_, pred, action, obs, belief_)) belief_ = std::move(pred);
}

int LookaheadPolicy::choose(const Belief& b, OpCounter& ops) {
    const ValueFn counted = [&](const Belief& x) {
        ops.dot_products += cost_;
        return value_(x);
    };
    return lookahead_action(model(), counted, b, &ops).action;
}

DirectPolicy::DirectPolicy(const Pomdp& m, PwlcFn f, std::string name)
    : BeliefPolicy(m), f_(std::move(f)), name_(std::move(name)) {
    if (f_.empty()) throw ValidationError("direct policy needs a nonempty PWLC function");
    for (const auto& v : f_.vectors) {
        if (v.action < 0 || v.action >= m.num_actions()) {
            throw ValidationError("direct policy needs action-tagged vectors");
        }
    }
}

int DirectPolicy::choose(const Belief& b, OpCounter& ops) {
    ops.dot_products += static_cast<std::int64_t>(f_.size());
    return direct_action(f_, b);
}

LookaheadPolicy make_pwlc_lookahead(const Pomdp& m, const PwlcFn& f, std::string name) {
    return LookaheadPolicy(
        m, [f](const Belief& b) { return eval_pwlc(f, b).value; }, static_cast<std::int64_t>(f.size()),
        std::move(name));
}

}  // namespace pomdp
