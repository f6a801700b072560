#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pomdp {

using Rng = std::mt19937_64;

/// Probability distribution over hidden states.
using Belief = std::vector<double>;

/// Tolerance used for row-stochasticity and belief normalization checks.
inline constexpr double kProbTol = 1e-9;
/// P(o|b,a) at or below this is treated as an impossible observation.
inline constexpr double kImpossibleObsTol = 1e-12;

inline double dot(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

struct ModelSizes {
    int states = 1;
    int actions = 1;
    int observations = 1;
};

/**
 * Finite POMDP with dense tables.
 *
 * Transitions are P(s'|s,a), observations P(o|s',a) (conditioned on the
 * landing state), rewards R(s,a,s'). The expected one-step reward
 * rho(s,a) = sum_{s'} R(s,a,s') P(s'|s,a) and the joint P(s',o|s,a) are
 * precomputed on construction. Instances are immutable.
 */
class Pomdp {
public:
    /// Tables are indexed trans[a][s][s'], obs[a][s'][o], reward[a][s][s'].
    Pomdp(std::vector<std::vector<std::vector<double>>> trans,
          std::vector<std::vector<std::vector<double>>> obs,
          std::vector<std::vector<std::vector<double>>> reward,
          double discount);

    int num_states() const { return n_states_; }
    int num_actions() const { return n_actions_; }
    int num_obs() const { return n_obs_; }
    double discount() const { return discount_; }

    double trans(int s, int a, int sp) const {
        return trans_[(static_cast<std::size_t>(a) * n_states_ + s) * n_states_ + sp];
    }
    double obs(int a, int sp, int o) const {
        return obs_[(static_cast<std::size_t>(a) * n_states_ + sp) * n_obs_ + o];
    }
    double reward(int s, int a, int sp) const {
        return reward_[(static_cast<std::size_t>(a) * n_states_ + s) * n_states_ + sp];
    }
    double rho(int s, int a) const { return rho_[static_cast<std::size_t>(s) * n_actions_ + a]; }
    /// P(s',o|s,a).
    double joint(int s, int a, int o, int sp) const {
        return joint_[joint_offset(s, a, o) + sp];
    }
    /// Row P(.,o|s,a) over landing states.
    std::span<const double> joint_row(int s, int a, int o) const {
        return {joint_.data() + joint_offset(s, a, o), static_cast<std::size_t>(n_states_)};
    }
    std::span<const double> trans_row(int s, int a) const {
        return {trans_.data() + (static_cast<std::size_t>(a) * n_states_ + s) * n_states_,
                static_cast<std::size_t>(n_states_)};
    }

    /// Expected one-step reward table rho(s,a), row-major over s.
    const std::vector<double>& rho_table() const { return rho_; }

    std::vector<std::string> state_names;
    std::vector<std::string> action_names;
    std::vector<std::string> obs_names;

private:
    std::size_t joint_offset(int s, int a, int o) const {
        return ((static_cast<std::size_t>(a) * n_obs_ + o) * n_states_ + s) * n_states_;
    }
    void validate() const;

    int n_states_ = 0;
    int n_actions_ = 0;
    int n_obs_ = 0;
    double discount_ = 0.0;
    std::vector<double> trans_;
    std::vector<double> obs_;
    std::vector<double> reward_;
    std::vector<double> rho_;
    std::vector<double> joint_;
};

/// Throws ValidationError unless b is a distribution over n states.
void validate_belief(const Belief& b, int n);
bool is_belief(const Belief& b, int n, double tol = kProbTol);

Belief extreme_belief(int n, int s);
Belief uniform_belief(int n);

/// sum_s P(s'|s,a) b(s).
Belief predict(const Pomdp& m, const Belief& b, int a);

/// P(o|b,a) for every observation.
std::vector<double> obs_prob(const Pomdp& m, const Belief& b, int a);

/// tau(b,a,o). Throws ImpossibleObservation when P(o|b,a) <= kImpossibleObsTol.
Belief belief_update(const Pomdp& m, const Belief& b, int a, int o);

/// Same as belief_update but reuses an already computed prediction; returns
/// false (leaving out untouched) for impossible observations.
bool belief_update_from_prediction(const Pomdp& m, const Belief& predicted, int a,
                                   int o, Belief& out);

/// rho(b,a) = sum_s rho(s,a) b(s).
double expected_reward(const Pomdp& m, const Belief& b, int a);

/// Uniform sample from the (n-1)-simplex (symmetric Dirichlet, unit concentration).
Belief sample_belief_uniform(Rng& rng, int n);

std::vector<Belief> sample_beliefs_uniform(Rng& rng, int n, int count);

/// Samples an index from a discrete distribution using one uniform draw u in [0,1).
int sample_index(std::span<const double> probs, double u);

/**
 * Random test instance. Rows are drawn from a symmetric Dirichlet, then each
 * entry is zeroed with probability `sparsity` (keeping at least one nonzero)
 * and the row renormalized. Rewards are uniform on [0,1].
 */
Pomdp random_pomdp(Rng& rng, ModelSizes sizes, double discount, double sparsity = 0.0);

}  // namespace pomdp
