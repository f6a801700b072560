#include "pomdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pomdp {

MdpSolution solve_mdp(const FiniteMdp& mdp, double eps, int max_iters, const std::vector<double>* init) {
    const int ns = mdp.num_states, na = mdp.num_actions;
    MdpSolution sol;
    sol.values = init ? *init : std::vector<double>(static_cast<std::size_t>(ns), 0.0);
    sol.q.assign(static_cast<std::size_t>(ns) * na, 0.0);
    std::vector<double> next(static_cast<std::size_t>(ns));
    sol.bellman_error = std::numeric_limits<double>::infinity();
    while (sol.iterations < max_iters) {
        double err = 0.0;
        for (int s = 0; s < ns; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < na; ++a) {
                double acc = 0.0;
                for (const auto& e : mdp.row(s, a)) acc += e.prob * sol.values[e.next];
                const double q = mdp.r(s, a) + mdp.discount * acc;
                sol.q[static_cast<std::size_t>(s) * na + a] = q;
                best = std::max(best, q);
            }
            next[s] = best;
            err = std::max(err, std::abs(best - sol.values[s]));
        }
        sol.values.swap(next);
        ++sol.iterations;
        sol.bellman_error = err;
        if (err <= eps) break;
    }
    return sol;
}

}  // namespace pomdp
