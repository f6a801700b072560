#pragma once

#include <cstdint>

namespace pomdp {

/// Instrumented primitive-operation counts used for machine-independent
/// reaction-time comparisons.
struct OpCounter {
    std::int64_t belief_updates = 0;
    std::int64_t dot_products = 0;
    std::int64_t lookups = 0;

    void reset() { *this = OpCounter{}; }
    /// Weighted cost with a belief update counted as `num_states` dot products.
    std::int64_t weighted(int num_states) const {
        return lookups + dot_products + belief_updates * num_states;
    }
};

}  // namespace pomdp
