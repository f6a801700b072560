#pragma once

#include <cstdint>
#include <vector>

#include "pomdp/exact_dp.hpp"
#include "pomdp/model.hpp"
#include "pomdp/ops.hpp"
#include "pomdp/policy.hpp"

namespace pomdp {

/// Episode-local generator derived from the master seed and episode index,
/// so episodes are reproducible independently of their order.
Rng episode_rng(std::uint64_t master_seed, std::uint64_t episode);

/**
 * One trajectory: the hidden start state is drawn from b0 with one uniform,
 * then every step uses one uniform for the transition and one for the
 * observation. Returns sum_t discount^t R(s_t, a_t, s_{t+1}).
 */
double simulate_episode(const Pomdp& m, Policy& p, const Belief& b0, int horizon, Rng& rng,
                        OpCounter* ops = nullptr);

struct ControlResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<double> returns;  ///< one per start, in order
    OpCounter ops;
    std::int64_t decisions = 0;

    /// Weighted operation count per decision.
    double ops_per_decision(int num_states) const;
};

/// One episode per start with common random numbers: episode i uses episode_rng(seed, i).
ControlResult control_quality(const Pomdp& m, Policy& p, const std::vector<Belief>& starts, int horizon,
                              std::uint64_t seed);

/// Mean of V over the belief set.
double bound_quality(const ValueFn& value, const std::vector<Belief>& beliefs);

struct PairedStats {
    double mean_diff = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};

/// Statistics of a[i] - b[i]. Throws ValidationError on length mismatch or empty input.
PairedStats paired_diff(const std::vector<double>& a, const std::vector<double>& b);

/// Sample mean and standard error of the mean.
std::pair<double, double> mean_and_se(const std::vector<double>& xs);

}  // namespace pomdp
