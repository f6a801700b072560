#include "pomdp/model.hpp"

#include <cmath>
#include <sstream>

#include "pomdp/errors.hpp"

namespace pomdp {

namespace {

using Table3 = std::vector<std::vector<std::vector<double>>>;

std::vector<double> flatten(const Table3& t, int d0, int d1, int d2, const char* name) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(d0) * d1 * d2);
    if (static_cast<int>(t.size()) != d0) {
        throw ValidationError(std::string(name) + ": wrong number of action blocks");
    }
    for (int i = 0; i < d0; ++i) {
        if (static_cast<int>(t[i].size()) != d1) {
            throw ValidationError(std::string(name) + ": wrong row count in block " +
                                  std::to_string(i));
        }
        for (int j = 0; j < d1; ++j) {
            if (static_cast<int>(t[i][j].size()) != d2) {
                std::ostringstream msg;
                msg << name << ": row (" << i << "," << j << ") has " << t[i][j].size()
                    << " entries, expected " << d2;
                throw ValidationError(msg.str());
            }
            out.insert(out.end(), t[i][j].begin(), t[i][j].end());
        }
    }
    return out;
}

double exp_draw(Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return -std::log1p(-unif(rng));
}

}  // namespace

Pomdp::Pomdp(Table3 trans_table, Table3 obs_table, Table3 reward_table, double discount)
    : discount_(discount) {
    if (trans_table.empty() || trans_table[0].empty()) throw ValidationError("model has no actions or states");
    n_actions_ = static_cast<int>(trans_table.size());
    n_states_ = static_cast<int>(trans_table[0].size());
    if (obs_table.empty() || obs_table[0].empty() || obs_table[0][0].empty()) {
        throw ValidationError("model has no observations");
    }
    n_obs_ = static_cast<int>(obs_table[0][0].size());

    trans_ = flatten(trans_table, n_actions_, n_states_, n_states_, "transition");
    obs_ = flatten(obs_table, n_actions_, n_states_, n_obs_, "observation");
    reward_ = flatten(reward_table, n_actions_, n_states_, n_states_, "reward");
    validate();

    rho_.assign(static_cast<std::size_t>(n_states_) * n_actions_, 0.0);
    for (int a = 0; a < n_actions_; ++a) {
        for (int s = 0; s < n_states_; ++s) {
            double acc = 0.0;
            for (int sp = 0; sp < n_states_; ++sp) acc += reward(s, a, sp) * trans(s, a, sp);
            rho_[static_cast<std::size_t>(s) * n_actions_ + a] = acc;
        }
    }

    joint_.assign(static_cast<std::size_t>(n_actions_) * n_obs_ * n_states_ * n_states_, 0.0);
    for (int a = 0; a < n_actions_; ++a) {
        for (int o = 0; o < n_obs_; ++o) {
            for (int s = 0; s < n_states_; ++s) {
                const std::size_t off = joint_offset(s, a, o);
                for (int sp = 0; sp < n_states_; ++sp) {
                    joint_[off + sp] = trans(s, a, sp) * obs(a, sp, o);
                }
            }
        }
    }
}

void Pomdp::validate() const {
    if (!(discount_ >= 0.0 && discount_ < 1.0)) {
        throw ValidationError("discount must lie in [0,1), got " + std::to_string(discount_));
    }
    for (int a = 0; a < n_actions_; ++a) {
        for (int s = 0; s < n_states_; ++s) {
            double sum = 0.0;
            for (int sp = 0; sp < n_states_; ++sp) {
                const double p = trans(s, a, sp);
                if (!(p >= 0.0 && p <= 1.0)) {
                    std::ostringstream msg;
                    msg << "transition entry (s=" << s << ",a=" << a << ",s'=" << sp
                        << ") = " << p << " is not a probability";
                    throw ValidationError(msg.str());
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > kProbTol) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "transition row (s=" << s << ",a=" << a << ") sums to " << sum;
                throw ValidationError(msg.str());
            }
            for (int sp = 0; sp < n_states_; ++sp) {
                if (!std::isfinite(reward(s, a, sp))) {
                    std::ostringstream msg;
                    msg << "reward (s=" << s << ",a=" << a << ",s'=" << sp << ") is not finite";
                    throw ValidationError(msg.str());
                }
            }
        }
        for (int sp = 0; sp < n_states_; ++sp) {
            double sum = 0.0;
            for (int o = 0; o < n_obs_; ++o) {
                const double p = obs(a, sp, o);
                if (!(p >= 0.0 && p <= 1.0)) {
                    std::ostringstream msg;
                    msg << "observation entry (a=" << a << ",s'=" << sp << ",o=" << o
                        << ") = " << p << " is not a probability";
                    throw ValidationError(msg.str());
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > kProbTol) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "observation row (a=" << a << ",s'=" << sp << ") sums to " << sum;
                throw ValidationError(msg.str());
            }
        }
    }
}

bool is_belief(const Belief& b, int n, double tol) {
    if (static_cast<int>(b.size()) != n) return false;
    double sum = 0.0;
    for (double x : b) {
        if (!(x >= -tol)) return false;
        sum += x;
    }
    return std::abs(sum - 1.0) <= tol;
}

void validate_belief(const Belief& b, int n) {
    if (static_cast<int>(b.size()) != n) {
        throw ValidationError("belief has " + std::to_string(b.size()) + " entries, expected " +
                              std::to_string(n));
    }
    if (!is_belief(b, n)) throw ValidationError("belief is not a probability distribution");
}

Belief extreme_belief(int n, int s) {
    Belief b(static_cast<std::size_t>(n), 0.0);
    b[static_cast<std::size_t>(s)] = 1.0;
    return b;
}

Belief uniform_belief(int n) { return Belief(static_cast<std::size_t>(n), 1.0 / n); }

Belief predict(const Pomdp& m, const Belief& b, int a) {
    const int n = m.num_states();
    Belief out(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s < n; ++s) {
        const double w = b[s];
        if (w == 0.0) continue;
        auto row = m.trans_row(s, a);
        for (int sp = 0; sp < n; ++sp) out[sp] += w * row[sp];
    }
    return out;
}

std::vector<double> obs_prob(const Pomdp& m, const Belief& b, int a) {
    const Belief pred = predict(m, b, a);
    std::vector<double> out(static_cast<std::size_t>(m.num_obs()), 0.0);
    for (int sp = 0; sp < m.num_states(); ++sp) {
        if (pred[sp] == 0.0) continue;
        for (int o = 0; o < m.num_obs(); ++o) out[o] += m.obs(a, sp, o) * pred[sp];
    }
    return out;
}

bool belief_update_from_prediction(const Pomdp& m, const Belief& predicted, int a,
                                   int o, Belief& out) {
    const int n = m.num_states();
    Belief next(static_cast<std::size_t>(n));
    double norm = 0.0;
    for (int sp = 0; sp < n; ++sp) {
        next[sp] = m.obs(a, sp, o) * predicted[sp];
        norm += next[sp];
    }
    if (norm <= kImpossibleObsTol) return false;
    for (double& x : next) x /= norm;
    out = std::move(next);
    return true;
}

Belief belief_update(const Pomdp& m, const Belief& b, int a, int o) {
    const Belief pred = predict(m, b, a);
    Belief out;
    if (!belief_update_from_prediction(m, pred, a, o, out)) {
        throw ImpossibleObservation("observation " + std::to_string(o) + " has probability 0 after action " +
                                    std::to_string(a));
    }
    return out;
}

double expected_reward(const Pomdp& m, const Belief& b, int a) {
    double acc = 0.0;
    for (int s = 0; s < m.num_states(); ++s) acc += m.rho(s, a) * b[s];
    return acc;
}

Belief sample_belief_uniform(Rng& rng, int n) {
    Belief b(static_cast<std::size_t>(n));
    if (n == 1) {
        b[0] = 1.0;
        return b;
    }
    double sum = 0.0;
    for (double& x : b) {
        x = exp_draw(rng);
        sum += x;
    }
    for (double& x : b) x /= sum;
    return b;
}

std::vector<Belief> sample_beliefs_uniform(Rng& rng, int n, int count) {
    std::vector<Belief> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(sample_belief_uniform(rng, n));
    return out;
}

int sample_index(std::span<const double> probs, double u) {
    double cum = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        last_positive = static_cast<int>(i);
        cum += probs[i];
        if (u < cum) return static_cast<int>(i);
    }
    return last_positive;
}

Pomdp random_pomdp(Rng& rng, ModelSizes sizes, double discount, double sparsity) {
    const int ns = sizes.states, na = sizes.actions, no = sizes.observations;
    if (ns < 1 || na < 1 || no < 1) throw ValidationError("model sizes must be >= 1");
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    auto draw_row = [&](int len) {
        std::vector<double> row(static_cast<std::size_t>(len));
        for (double& x : row) x = exp_draw(rng);
        if (sparsity > 0.0 && len > 1) {
            const int keep = static_cast<int>(unif(rng) * len) % len;
            for (int i = 0; i < len; ++i) {
                if (i != keep && unif(rng) < sparsity) row[i] = 0.0;
            }
        }
        double sum = 0.0;
        for (double x : row) sum += x;
        for (double& x : row) x /= sum;
        return row;
    };

    Table3 trans(na, std::vector<std::vector<double>>(ns));
    Table3 obs(na, std::vector<std::vector<double>>(ns));
    Table3 reward(na, std::vector<std::vector<double>>(ns, std::vector<double>(ns)));
    for (int a = 0; a < na; ++a) {
        for (int s = 0; s < ns; ++s) trans[a][s] = draw_row(ns);
        for (int sp = 0; sp < ns; ++sp) obs[a][sp] = draw_row(no);
        for (int s = 0; s < ns; ++s) {
            for (int sp = 0; sp < ns; ++sp) reward[a][s][sp] = unif(rng);
        }
    }
    return Pomdp(std::move(trans), std::move(obs), std::move(reward), discount);
}

}  // namespace pomdp
