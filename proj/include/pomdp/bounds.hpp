#pragma once

#include <functional>
#include <vector>

#include "pomdp/exact_dp.hpp"
#include "pomdp/mdp.hpp"
#include "pomdp/model.hpp"
#include "pomdp/pwlc.hpp"

namespace pomdp {

/// Action values of the fully observable problem.
struct QTable {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> q;  ///< q[s * num_actions + a]
    std::vector<double> v;  ///< v[s] = max_a q(s,a)

    double at(int s, int a) const { return q[static_cast<std::size_t>(s) * num_actions + a]; }
};

/// One linear function per action, alpha[s * num_actions + a].
struct FibTable {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> alpha;
    double bellman_error = 0.0;
    int iterations = 0;

    double at(int s, int a) const { return alpha[static_cast<std::size_t>(s) * num_actions + a]; }
};

/// The underlying MDP of a POMDP (observations dropped).
FiniteMdp underlying_mdp(const Pomdp& m);

/// Value iteration on the underlying MDP to sup-norm change eps.
QTable solve_fomdp(const Pomdp& m, double eps);

enum class MdpMode { kMdp, kQmdp };

/// kMdp: sum_s b(s) v(s). kQmdp: max_a sum_s b(s) q(s,a).
double mdp_value(const QTable& q, const Belief& b, MdpMode mode);

/// Single untagged vector v.
PwlcFn mdp_pwlc(const QTable& q);
/// |A| action-tagged vectors q(., a).
PwlcFn qmdp_pwlc(const QTable& q);
/// |A| action-tagged vectors alpha(., a).
PwlcFn fib_pwlc(const FibTable& t);

/// Single vector max_a [rho + discount * sum_{s'} P(s'|s,a) max_i alpha_i(s')].
PwlcFn mdp_backup(const Pomdp& m, const PwlcFn& f);
/// Per-action vectors rho + discount * sum_{s'} P(s'|s,a) max_i alpha_i(s').
PwlcFn qmdp_backup(const Pomdp& m, const PwlcFn& f);
/// Per-action vectors rho + discount * sum_o max_i sum_{s'} P(s',o|s,a) alpha_i(s').
PwlcFn fib_backup(const Pomdp& m, const PwlcFn& f);

using Partition = std::vector<std::vector<int>>;

/// Throws ValidationError unless the blocks are nonempty, disjoint and cover all states.
void validate_partition(const Partition& blocks, int num_states);

/**
 * FIB update with one independent choice of predecessor vector per block of
 * states and per observation. Singleton blocks give fib_backup; one block
 * gives exact_backup. Output is pruned. Throws ResourceError past the cap.
 */
PwlcFn partitioned_fib_backup(const Pomdp& m, const PwlcFn& f, const Partition& blocks,
                              const BackupOptions& opts = {});

/// All |A||f| candidates rho + discount * P(.|.,a) alpha_i, unpruned. Witnesses
/// repeat i for every observation.
PwlcFn umdp_candidates(const Pomdp& m, const PwlcFn& f);
PwlcFn umdp_backup(const Pomdp& m, const PwlcFn& f, double tol = kPruneTol);

/// States of the equivalent MDP, indexed (s * |A| + a) * |O| + o.
FiniteMdp fib_equivalent_mdp(const Pomdp& m);

/// Fixed point of the FIB update through its equivalent MDP; the induced
/// alpha(s,a) has Bellman error <= eps.
FibTable fib_fixed_point(const Pomdp& m, double eps);

using PwlcUpdate = std::function<PwlcFn(const PwlcFn&)>;

struct BoundIteration {
    PwlcFn f;
    double bellman_error = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Repeats `update` until the exact sup-norm change is <= eps or max_iters.
BoundIteration iterate_update(const PwlcUpdate& update, const PwlcFn& f0, double eps, int max_iters);

}  // namespace pomdp
