#include "pomdp/pointdp.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "pomdp/errors.hpp"
#include "pomdp/exact_dp.hpp"
#include "pomdp/fsm.hpp"

namespace pomdp {

namespace {

bool covers(const std::vector<double>& hi, const std::vector<double>& lo) {
    for (std::size_t i = 0; i < hi.size(); ++i) {
        if (hi[i] < lo[i]) return false;
    }
    return true;
}

}  // namespace

AlphaVector point_backup(const Pomdp& m, const PwlcFn& f, const Belief& b) {
    if (f.empty()) throw ValidationError("point backup needs a nonempty PWLC function");
    const int n = m.num_states(), no = m.num_obs();
    AlphaVector best;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> weight(static_cast<std::size_t>(n));
    for (int a = 0; a < m.num_actions(); ++a) {
        std::vector<int> choice(static_cast<std::size_t>(no), 0);
        for (int o = 0; o < no; ++o) {
            // weight(s') = sum_s P(s',o|s,a) b(s)
            std::fill(weight.begin(), weight.end(), 0.0);
            bool any = false;
            for (int s = 0; s < n; ++s) {
                if (b[s] == 0.0) continue;
                const auto row = m.joint_row(s, a, o);
                for (int sp = 0; sp < n; ++sp) weight[sp] += row[sp] * b[s];
                any = true;
            }
            if (!any) continue;
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < f.size(); ++i) {
                const double v = dot(weight, f.vectors[i].coeffs);
                if (v > top) {
                    top = v;
                    choice[o] = static_cast<int>(i);
                }
            }
        }
        AlphaVector cand;
        cand.action = a;
        cand.witnesses = choice;
        cand.coeffs.resize(static_cast<std::size_t>(n));
        for (int s = 0; s < n; ++s) {
            double future = 0.0;
            for (int o = 0; o < no; ++o) future += dot(m.joint_row(s, a, o), f.vectors[choice[o]].coeffs);
            cand.coeffs[s] = m.rho(s, a) + m.discount() * future;
        }
        const double v = cand.value(b);
        if (v > best_value) {
            best_value = v;
            best = std::move(cand);
        }
    }
    return best;
}

PwlcFn gl_update(const Pomdp& m, const PwlcFn& f, const std::vector<Belief>& points) {
    if (points.empty()) throw ValidationError("gl_update needs at least one point");
    PwlcFn out;
    for (const auto& b : points) out.vectors.push_back(point_backup(m, f, b));
    return dedupe(out);
}

PwlcFn gl_iterate(const Pomdp& m, const PwlcFn& f0, const std::vector<Belief>& points, int iterations) {
    PwlcFn f = f0;
    for (int i = 0; i < iterations; ++i) f = gl_update(m, f, points);
    return f;
}

IncrementalResult incremental_update(const Pomdp& m, const LowerBoundFn& lb, const std::vector<Belief>& points,
                                     const IncrementalOptions& opts) {
    if (lb.f.empty()) throw ValidationError("incremental update needs a nonempty starting set");
    IncrementalResult res;
    res.lb = lb;
    auto& vecs = res.lb.f.vectors;
    const PwlcFn start = lb.f;
    for (const auto& b : points) {
        AlphaVector alpha = point_backup(m, opts.batch ? start : res.lb.f, b);
        // Witness indices refer to a set that changes below; drop them.
        alpha.witnesses.clear();
        const bool redundant =
            std::any_of(vecs.begin(), vecs.end(), [&](const AlphaVector& v) { return covers(v.coeffs, alpha.coeffs); });
        if (redundant) continue;
        if (vecs.size() + 1 > opts.max_vectors) {
            res.capped = true;
            break;
        }
        vecs.erase(std::remove_if(vecs.begin(), vecs.end(),
                                  [&](const AlphaVector& v) { return covers(alpha.coeffs, v.coeffs); }),
                   vecs.end());
        vecs.push_back(std::move(alpha));
        ++res.added;
    }
    if (opts.lp_prune) res.lb.f = prune(res.lb.f);
    return res;
}

LowerBoundFn one_action_lower_bound(const Pomdp& m) {
    LowerBoundFn lb;
    for (int a = 0; a < m.num_actions(); ++a) {
        const FsmController c = evaluate_fsm(m, make_one_action_fsm(m, a));
        lb.f.vectors.push_back({c.values[0], a, {}});
    }
    lb.f = remove_pointwise_dominated(dedupe(lb.f));
    lb.certified = true;
    return lb;
}

std::vector<Belief> order_extremes(const Pomdp& m, const PwlcFn& f) {
    if (f.empty()) throw ValidationError("ordering extremes needs a nonempty PWLC function");
    const int n = m.num_states();
    std::vector<double> value(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
    for (const auto& v : f.vectors) {
        for (int s = 0; s < n; ++s) value[s] = std::max(value[s], v.coeffs[s]);
    }
    const auto [lo, hi] = std::minmax_element(value.begin(), value.end());
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) order[s] = s;
    if (*hi - *lo > 1e-12) {
        const int top = static_cast<int>(hi - value.begin());
        // Predecessor lists: p -> q whenever some action moves p to q.
        std::vector<std::vector<int>> pred(static_cast<std::size_t>(n));
        for (int p = 0; p < n; ++p) {
            for (int q = 0; q < n; ++q) {
                for (int a = 0; a < m.num_actions(); ++a) {
                    if (m.trans(p, a, q) > 0.0) {
                        pred[q].push_back(p);
                        break;
                    }
                }
            }
        }
        const int far = std::numeric_limits<int>::max();
        std::vector<int> dist(static_cast<std::size_t>(n), far);
        std::deque<int> queue{top};
        dist[top] = 0;
        while (!queue.empty()) {
            const int q = queue.front();
            queue.pop_front();
            for (int p : pred[q]) {
                if (dist[p] != far) continue;
                dist[p] = dist[q] + 1;
                queue.push_back(p);
            }
        }
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return dist[x] < dist[y]; });
    }
    std::vector<Belief> out;
    for (int s : order) out.push_back(extreme_belief(n, s));
    return out;
}

std::vector<Belief> simulate_point_sequence(const Pomdp& m, const Belief& b0, const PwlcFn& f, int len, Rng& rng) {
    if (len < 1) throw ValidationError("point sequence length must be >= 1");
    validate_belief(b0, m.num_states());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const ValueFn value = [&f](const Belief& b) { return eval_pwlc(f, b).value; };
    std::vector<Belief> seq{b0};
    Belief b = b0;
    while (static_cast<int>(seq.size()) < len) {
        const int a = lookahead_action(m, value, b).action;
        const int o = sample_index(obs_prob(m, b, a), unif(rng));
        b = belief_update(m, b, a, o);
        seq.push_back(b);
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
}

std::vector<Belief> two_tier_points(const Pomdp& m, const PwlcFn& f, int len, Rng& rng) {
    std::vector<Belief> out;
    for (const auto& e : order_extremes(m, f)) {
        const auto seq = simulate_point_sequence(m, e, f, len, rng);
        out.insert(out.end(), seq.begin(), seq.end());
    }
    return out;
}

}  // namespace pomdp
