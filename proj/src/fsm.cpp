#include "pomdp/fsm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pomdp/errors.hpp"

namespace pomdp {

namespace {

bool same_coeffs(const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - y[i]) > 1e-12) return false;
    }
    return true;
}

bool covers(const std::vector<double>& hi, const std::vector<double>& lo) {
    for (std::size_t i = 0; i < hi.size(); ++i) {
        if (hi[i] < lo[i]) return false;
    }
    return true;
}

// One application of the fixed-strategy operator to the value table v[x*n+s].
std::vector<double> apply_fsm(const Pomdp& m, const FsmController& c, const std::vector<double>& v) {
    const int n = m.num_states();
    std::vector<double> out(static_cast<std::size_t>(c.size()) * n);
    for (int x = 0; x < c.size(); ++x) {
        const int a = c.action[x];
        for (int s = 0; s < n; ++s) {
            double acc = 0.0;
            for (int o = 0; o < m.num_obs(); ++o) {
                const double* succ = v.data() + static_cast<std::size_t>(c.next[x][o]) * n;
                acc += dot(m.joint_row(s, a, o), std::span<const double>(succ, static_cast<std::size_t>(n)));
            }
            out[static_cast<std::size_t>(x) * n + s] = m.rho(s, a) + m.discount() * acc;
        }
    }
    return out;
}

}  // namespace

void validate_fsm(const Pomdp& m, const FsmController& c) {
    if (c.size() == 0) throw ValidationError("controller has no memory states");
    if (c.next.size() != c.action.size()) throw ValidationError("controller transition table size mismatch");
    for (int x = 0; x < c.size(); ++x) {
        if (c.action[x] < 0 || c.action[x] >= m.num_actions()) {
            throw ValidationError("memory state " + std::to_string(x) + " emits an unknown action");
        }
        if (static_cast<int>(c.next[x].size()) != m.num_obs()) {
            throw ValidationError("memory state " + std::to_string(x) + " does not cover every observation");
        }
        for (int y : c.next[x]) {
            if (y < 0 || y >= c.size()) throw ValidationError("memory state " + std::to_string(x) + " links outside");
        }
    }
    if (c.evaluated()) {
        if (static_cast<int>(c.values.size()) != c.size()) throw ValidationError("value table size mismatch");
        for (const auto& row : c.values) {
            if (static_cast<int>(row.size()) != m.num_states()) throw ValidationError("value row size mismatch");
            for (double v : row) {
                if (!std::isfinite(v)) throw ValidationError("controller value is not finite");
            }
        }
    }
}

FsmController make_one_action_fsm(const Pomdp& m, int action) {
    if (action < 0 || action >= m.num_actions()) throw ValidationError("unknown action " + std::to_string(action));
    FsmController c;
    c.action = {action};
    c.next = {std::vector<int>(static_cast<std::size_t>(m.num_obs()), 0)};
    return c;
}

FsmController evaluate_fsm(const Pomdp& m, const FsmController& c, int dense_limit) {
    FsmController out = c;
    out.values.clear();
    validate_fsm(m, out);
    const int n = m.num_states(), k = c.size();
    const int dim = n * k;
    const double g = m.discount();
    std::vector<double> v(static_cast<std::size_t>(dim), 0.0);

    if (dim <= dense_limit) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(dim, dim);
        Eigen::VectorXd r(dim);
        for (int x = 0; x < k; ++x) {
            const int a = c.action[x];
            for (int s = 0; s < n; ++s) {
                const int row = x * n + s;
                r(row) = m.rho(s, a);
                for (int o = 0; o < m.num_obs(); ++o) {
                    const auto joint = m.joint_row(s, a, o);
                    const int base = c.next[x][o] * n;
                    for (int sp = 0; sp < n; ++sp) {
                        if (joint[sp] != 0.0) A(row, base + sp) -= g * joint[sp];
                    }
                }
            }
        }
        const Eigen::VectorXd sol = A.partialPivLu().solve(r);
        for (int i = 0; i < dim; ++i) v[i] = sol(i);
    } else {
        // Iterate the contraction; stop once the change bounds the remaining error below 1e-11.
        for (int it = 0; it < 1000000; ++it) {
            std::vector<double> nv = apply_fsm(m, c, v);
            double diff = 0.0;
            for (int i = 0; i < dim; ++i) diff = std::max(diff, std::abs(nv[i] - v[i]));
            v.swap(nv);
            if (diff * g / (1.0 - g) <= 1e-11 || diff == 0.0) break;
        }
    }
    out.values.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(n)));
    for (int x = 0; x < k; ++x) {
        for (int s = 0; s < n; ++s) out.values[x][s] = v[static_cast<std::size_t>(x) * n + s];
    }
    return out;
}

double fsm_residual(const Pomdp& m, const FsmController& c) {
    if (!c.evaluated()) throw ValidationError("controller is not evaluated");
    std::vector<double> v;
    for (const auto& row : c.values) v.insert(v.end(), row.begin(), row.end());
    const std::vector<double> hv = apply_fsm(m, c, v);
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(hv[i] - v[i]));
    return worst;
}

FsmValue fsm_value(const FsmController& c, const Belief& b) {
    if (!c.evaluated()) throw ValidationError("controller is not evaluated");
    FsmValue best{-std::numeric_limits<double>::infinity(), 0};
    for (int x = 0; x < c.size(); ++x) {
        const double v = dot(c.values[x], b);
        if (v > best.value) best = {v, x};
    }
    return best;
}

PwlcFn fsm_pwlc(const FsmController& c) {
    if (!c.evaluated()) throw ValidationError("controller is not evaluated");
    PwlcFn f;
    for (int x = 0; x < c.size(); ++x) f.vectors.push_back({c.values[x], c.action[x], c.next[x]});
    return f;
}

PwlcFn h_fsm_update(const Pomdp& m, const FsmController& c, const PwlcFn& f) {
    validate_fsm(m, c);
    if (static_cast<int>(f.size()) != c.size()) {
        throw ValidationError("fixed-strategy update needs one vector per memory state");
    }
    const int n = m.num_states();
    std::vector<double> v;
    for (const auto& vec : f.vectors) {
        if (static_cast<int>(vec.coeffs.size()) != n) throw ValidationError("vector length mismatch");
        v.insert(v.end(), vec.coeffs.begin(), vec.coeffs.end());
    }
    const std::vector<double> hv = apply_fsm(m, c, v);
    PwlcFn out;
    for (int x = 0; x < c.size(); ++x) {
        AlphaVector a;
        a.coeffs.assign(hv.begin() + static_cast<std::ptrdiff_t>(x) * n, hv.begin() + static_cast<std::ptrdiff_t>(x + 1) * n);
        a.action = c.action[x];
        a.witnesses = c.next[x];
        out.vectors.push_back(std::move(a));
    }
    return out;
}

FsmController hansen_improve(const Pomdp& m, const FsmController& c, const BackupOptions& opts) {
    const FsmController cur = c.evaluated() ? c : evaluate_fsm(m, c);
    const PwlcFn backed = exact_backup(m, fsm_pwlc(cur), opts);
    const int k = cur.size();

    FsmController grown;
    grown.action = cur.action;
    grown.next = cur.next;
    std::vector<std::vector<double>> coeffs = cur.values;
    for (const auto& v : backed.vectors) {
        const bool known = std::any_of(cur.values.begin(), cur.values.end(),
                                       [&](const std::vector<double>& w) { return same_coeffs(v.coeffs, w); });
        if (known) continue;
        grown.action.push_back(v.action);
        grown.next.push_back(v.witnesses);
        coeffs.push_back(v.coeffs);
    }
    const int total = grown.size();

    // Old state -> dominating new state, or itself.
    std::vector<int> target(static_cast<std::size_t>(total));
    for (int x = 0; x < total; ++x) target[x] = x;
    for (int x = 0; x < k; ++x) {
        for (int y = k; y < total; ++y) {
            if (covers(coeffs[y], coeffs[x])) {
                target[x] = y;
                break;
            }
        }
    }
    std::vector<int> new_index(static_cast<std::size_t>(total), -1);
    FsmController out;
    for (int x = 0; x < total; ++x) {
        if (target[x] != x) continue;
        new_index[x] = out.size();
        out.action.push_back(grown.action[x]);
        out.next.push_back(grown.next[x]);
    }
    for (auto& row : out.next) {
        for (int& y : row) y = new_index[target[y]];
    }
    return evaluate_fsm(m, out);
}

PolicyIterationResult policy_iteration(const Pomdp& m, const FsmController& c0, double eps, int max_rounds,
                                       int max_states, const BackupOptions& opts) {
    PolicyIterationResult res;
    res.controller = c0.evaluated() ? c0 : evaluate_fsm(m, c0);
    const int n = m.num_states();
    while (res.rounds < max_rounds) {
        FsmController next = hansen_improve(m, res.controller, opts);
        double gain = 0.0;
        for (int s = 0; s < n; ++s) {
            const Belief e = extreme_belief(n, s);
            gain = std::max(gain, fsm_value(next, e).value - fsm_value(res.controller, e).value);
        }
        ++res.rounds;
        res.last_gain = gain;
        if (next.size() > max_states) {
            res.hit_cap = true;
            break;
        }
        res.controller = std::move(next);
        if (gain < eps) break;
    }
    return res;
}

FsmModePolicy::FsmModePolicy(FsmController c) : c_(std::move(c)) {
    if (!c_.evaluated()) throw ValidationError("FSM-mode policy needs an evaluated controller");
}

void FsmModePolicy::reset(const Belief& b0, OpCounter& ops) {
    ops.dot_products += c_.size();
    state_ = fsm_value(c_, b0).start;
}

int FsmModePolicy::act(OpCounter& ops) {
    ++ops.lookups;
    return c_.action[state_];
}

void FsmModePolicy::observe(int, int obs, OpCounter& ops) {
    ++ops.lookups;
    state_ = c_.next[state_][obs];
}

std::unique_ptr<Policy> make_fsm_direct_policy(const Pomdp& m, const FsmController& c) {
    return std::make_unique<DirectPolicy>(m, fsm_pwlc(c), "dr");
}

std::unique_ptr<Policy> make_fsm_lookahead_policy(const Pomdp& m, const FsmController& c) {
    return std::make_unique<LookaheadPolicy>(make_pwlc_lookahead(m, fsm_pwlc(c), "la"));
}

}  // namespace pomdp
