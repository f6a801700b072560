#include "pomdp/exact_dp.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pomdp/errors.hpp"

namespace pomdp {

namespace {

// Gamma^{a,o}: rho(.,a)/|O| + discount * sum_{s'} P(s',o|.,a) alpha_i(s'), witness i.
PwlcFn projected_set(const Pomdp& m, const PwlcFn& f, int a, int o, double tol) {
    const int n = m.num_states();
    const double share = 1.0 / m.num_obs();
    PwlcFn out;
    out.vectors.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        AlphaVector v;
        v.coeffs.resize(static_cast<std::size_t>(n));
        for (int s = 0; s < n; ++s) {
            v.coeffs[s] = m.rho(s, a) * share + m.discount() * dot(m.joint_row(s, a, o), f.vectors[i].coeffs);
        }
        v.action = a;
        v.witnesses = {static_cast<int>(i)};
        out.vectors.push_back(std::move(v));
    }
    return prune(out, tol);
}

PwlcFn cross_sum(const PwlcFn& x, const PwlcFn& y) {
    PwlcFn out;
    out.vectors.reserve(x.size() * y.size());
    for (const auto& u : x.vectors) {
        for (const auto& v : y.vectors) {
            AlphaVector w;
            w.coeffs.resize(u.coeffs.size());
            for (std::size_t s = 0; s < u.coeffs.size(); ++s) w.coeffs[s] = u.coeffs[s] + v.coeffs[s];
            w.action = u.action;
            w.witnesses = u.witnesses;
            w.witnesses.insert(w.witnesses.end(), v.witnesses.begin(), v.witnesses.end());
            out.vectors.push_back(std::move(w));
        }
    }
    return out;
}

}  // namespace

PwlcFn exact_backup(const Pomdp& m, const PwlcFn& f, const BackupOptions& opts) {
    if (f.empty()) throw ValidationError("exact_backup needs a nonempty PWLC function");
    PwlcFn all;
    for (int a = 0; a < m.num_actions(); ++a) {
        PwlcFn acc = projected_set(m, f, a, 0, opts.prune_tol);
        for (int o = 1; o < m.num_obs(); ++o) {
            const PwlcFn next = projected_set(m, f, a, o, opts.prune_tol);
            if (acc.size() * next.size() > opts.max_candidates) {
                throw ResourceError("exact backup candidate count " + std::to_string(acc.size() * next.size()) +
                                    " exceeds cap " + std::to_string(opts.max_candidates));
            }
            acc = prune(cross_sum(acc, next), opts.prune_tol);
        }
        for (auto& v : acc.vectors) all.vectors.push_back(std::move(v));
    }
    return prune(all, opts.prune_tol);
}

PwlcFn default_initial_pwlc(const Pomdp& m) {
    const auto& rho = m.rho_table();
    const double lo = *std::min_element(rho.begin(), rho.end());
    return constant_pwlc(m.num_states(), lo / (1.0 - m.discount()));
}

ValueIterationResult value_iteration(const Pomdp& m, const PwlcFn& f0, double eps, int max_iters,
                                     const BackupOptions& opts, bool keep_history) {
    if (!(eps > 0.0)) throw ValidationError("value_iteration needs eps > 0");
    ValueIterationResult res;
    res.f = f0;
    res.bellman_error = std::numeric_limits<double>::infinity();
    while (res.iterations < max_iters) {
        PwlcFn next;
        try {
            next = exact_backup(m, res.f, opts);
        } catch (const ResourceError&) {
            res.converged = false;
            return res;
        }
        res.bellman_error = pwlc_distance(next, res.f);
        res.f = std::move(next);
        ++res.iterations;
        if (keep_history) res.history.push_back(res.f);
        if (res.bellman_error <= eps) {
            res.converged = true;
            break;
        }
    }
    return res;
}

ActionChoice lookahead_action(const Pomdp& m, const ValueFn& value, const Belief& b, OpCounter* ops) {
    ActionChoice best{0, -std::numeric_limits<double>::infinity()};
    Belief next;
    for (int a = 0; a < m.num_actions(); ++a) {
        const Belief pred = predict(m, b, a);
        double future = 0.0;
        for (int o = 0; o < m.num_obs(); ++o) {
            double p = 0.0;
            for (int sp = 0; sp < m.num_states(); ++sp) p += m.obs(a, sp, o) * pred[sp];
            if (p <= kImpossibleObsTol) continue;
            if (!belief_update_from_prediction(m, pred, a, o, next)) continue;
            if (ops) ++ops->belief_updates;
            future += p * value(next);
        }
        const double q = expected_reward(m, b, a) + m.discount() * future;
        if (q > best.value) best = {a, q};
    }
    return best;
}

int direct_action(const PwlcFn& f, const Belief& b) {
    const PwlcEval e = eval_pwlc(f, b);
    if (e.index < 0) throw ValidationError("direct_action on an empty PWLC function");
    const int a = f.vectors[e.index].action;
    if (a < 0) throw ValidationError("maximizing vector carries no action tag");
    return a;
}

int PolicyGraph::newest_stage() const {
    int stage = 0;
    for (const auto& n : nodes) stage = std::max(stage, n.stage);
    return stage;
}

int PolicyGraph::start_node(const Belief& b) const {
    const int top = newest_stage();
    int best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].stage != top) continue;
        const double v = dot(nodes[i].coeffs, b);
        if (v > best_value) {
            best_value = v;
            best = static_cast<int>(i);
        }
    }
    return best;
}

PolicyGraph extract_policy_graph(const std::vector<PwlcFn>& history, bool close_cycle) {
    if (history.empty()) throw ValidationError("policy graph needs at least one stage");
    PolicyGraph g;
    g.cycle_closed = close_cycle;
    std::vector<int> stage_offset;
    int offset = 0;
    for (const auto& stage : history) {
        stage_offset.push_back(offset);
        offset += static_cast<int>(stage.size());
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
        for (std::size_t i = 0; i < history[k].size(); ++i) {
            const AlphaVector& v = history[k].vectors[i];
            PolicyNode node;
            node.action = v.action;
            node.stage = static_cast<int>(k);
            node.coeffs = v.coeffs;
            const int self = stage_offset[k] + static_cast<int>(i);
            if (k == 0) {
                const std::size_t num_obs = v.witnesses.empty() ? 1 : v.witnesses.size();
                node.next.assign(num_obs, close_cycle ? self : -1);
            } else {
                if (v.witnesses.empty()) throw ValidationError("stage vector has no witnesses");
                for (int w : v.witnesses) {
                    if (w < 0 || w >= static_cast<int>(history[k - 1].size())) {
                        throw ValidationError("dangling witness index " + std::to_string(w) + " in stage " +
                                              std::to_string(k));
                    }
                    node.next.push_back(stage_offset[k - 1] + w);
                }
            }
            g.nodes.push_back(std::move(node));
        }
    }
    return g;
}

}  // namespace pomdp
