#pragma once

#include <utility>
#include <vector>

namespace pomdp {

/// Fully observable finite MDP with sparse transition rows.
struct FiniteMdp {
    struct Entry {
        int next;
        double prob;
    };

    int num_states = 0;
    int num_actions = 0;
    double discount = 0.0;
    /// rows[s * num_actions + a] lists (s', P(s'|s,a)).
    std::vector<std::vector<Entry>> rows;
    /// reward[s * num_actions + a].
    std::vector<double> reward;

    const std::vector<Entry>& row(int s, int a) const { return rows[static_cast<std::size_t>(s) * num_actions + a]; }
    double r(int s, int a) const { return reward[static_cast<std::size_t>(s) * num_actions + a]; }
};

struct MdpSolution {
    std::vector<double> values;
    std::vector<double> q;  ///< q[s * num_actions + a]
    int iterations = 0;
    double bellman_error = 0.0;
};

/// Value iteration until the sup-norm change between iterates is <= eps.
/// `init` (optional) warm-starts the values.
MdpSolution solve_mdp(const FiniteMdp& mdp, double eps, int max_iters = 100000,
                      const std::vector<double>* init = nullptr);

}  // namespace pomdp
