#pragma once

#include <vector>

#include "pomdp/model.hpp"
#include "pomdp/pwlc.hpp"

namespace pomdp {

/// Lower-bound PWLC function. `certified` marks a starting set that came from
/// an evaluated controller, so every later iterate stays below the optimum.
struct LowerBoundFn {
    PwlcFn f;
    bool certified = false;
};

/// Largest vector set an incremental update may build.
inline constexpr std::size_t kDefaultVectorCap = 10'000;

/// Single-point backup: the action-tagged vector of the exact update that is
/// best at b, with one predecessor index per observation.
AlphaVector point_backup(const Pomdp& m, const PwlcFn& f, const Belief& b);

/// One point backup per grid point, duplicates dropped. The old set is not kept.
PwlcFn gl_update(const Pomdp& m, const PwlcFn& f, const std::vector<Belief>& points);

/// Repeats gl_update on a fixed point set; no convergence guarantee.
PwlcFn gl_iterate(const Pomdp& m, const PwlcFn& f0, const std::vector<Belief>& points, int iterations);

struct IncrementalOptions {
    bool lp_prune = false;  ///< full LP redundancy check after the batch
    bool batch = false;     ///< back up every point against the starting set
    std::size_t max_vectors = kDefaultVectorCap;
};

struct IncrementalResult {
    LowerBoundFn lb;
    int added = 0;
    bool capped = false;
};

/**
 * Adds the point backup of every point to the set, in order, each against the
 * current set. A new vector dominated coordinate-wise by an existing one is
 * skipped; old vectors it dominates are dropped. The value never decreases.
 */
IncrementalResult incremental_update(const Pomdp& m, const LowerBoundFn& lb, const std::vector<Belief>& points,
                                     const IncrementalOptions& opts = {});

/// Lower bound seeded with the best one-action controllers' values.
LowerBoundFn one_action_lower_bound(const Pomdp& m);

/**
 * Extreme beliefs ordered by breadth-first distance to the state of highest
 * value max_i alpha_i(s), following positive-probability transitions
 * backwards; ties and unreachable states go by index. Equal values give index order.
 */
std::vector<Belief> order_extremes(const Pomdp& m, const PwlcFn& f);

/// `len` beliefs visited by greedy lookahead on f from b0 with sampled
/// observations, returned last-visited first.
std::vector<Belief> simulate_point_sequence(const Pomdp& m, const Belief& b0, const PwlcFn& f, int len, Rng& rng);

/// Ordered extremes, each followed by its simulated sequence (reversed).
std::vector<Belief> two_tier_points(const Pomdp& m, const PwlcFn& f, int len, Rng& rng);

}  // namespace pomdp
