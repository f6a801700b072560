#pragma once

#include <string>

#include "pomdp/exact_dp.hpp"
#include "pomdp/model.hpp"
#include "pomdp/ops.hpp"
#include "pomdp/pwlc.hpp"

namespace pomdp {

/**
 * Action-selection contract used by the simulator. An episode calls
 * reset(b0) once, then alternates act() and observe(a, o).
 */
class Policy {
public:
    virtual ~Policy() = default;

    virtual std::string name() const = 0;
    /// True when observe() performs belief updates.
    virtual bool tracks_belief() const = 0;
    virtual void reset(const Belief& b0, OpCounter& ops) = 0;
    virtual int act(OpCounter& ops) = 0;
    virtual void observe(int action, int obs, OpCounter& ops) = 0;
};

/// Keeps the current belief; subclasses pick actions from it.
class BeliefPolicy : public Policy {
public:
    explicit BeliefPolicy(const Pomdp& m) : model_(m) {}

    bool tracks_belief() const override { return true; }
    void reset(const Belief& b0, OpCounter& ops) override;
    int act(OpCounter& ops) override { return choose(belief_, ops); }
    /// Bayes update. An observation the belief deems impossible leaves the
    /// predicted belief in place.
    void observe(int action, int obs, OpCounter& ops) override;

    const Belief& belief() const { return belief_; }

protected:
    virtual int choose(const Belief& b, OpCounter& ops) = 0;
    const Pomdp& model() const { return model_; }

private:
    const Pomdp& model_;
    Belief belief_;
};

/// One-step lookahead on a value function. `value_cost` dot products are
/// charged per evaluation of `value`.
class LookaheadPolicy : public BeliefPolicy {
public:
    LookaheadPolicy(const Pomdp& m, ValueFn value, std::int64_t value_cost, std::string name = "la")
        : BeliefPolicy(m), value_(std::move(value)), cost_(value_cost), name_(std::move(name)) {}

    std::string name() const override { return name_; }

protected:
    int choose(const Belief& b, OpCounter& ops) override;

private:
    ValueFn value_;
    std::int64_t cost_;
    std::string name_;
};

/// Action tag of the maximizing vector of an action-tagged PWLC function.
class DirectPolicy : public BeliefPolicy {
public:
    DirectPolicy(const Pomdp& m, PwlcFn f, std::string name = "dr");

    std::string name() const override { return name_; }

protected:
    int choose(const Belief& b, OpCounter& ops) override;

private:
    PwlcFn f_;
    std::string name_;
};

/// Lookahead policy over a PWLC function, charging |f| dot products per evaluation.
LookaheadPolicy make_pwlc_lookahead(const Pomdp& m, const PwlcFn& f, std::string name = "la");

}  // namespace pomdp
