#include "pomdp/bounds.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pomdp/errors.hpp"

namespace pomdp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Pointwise upper envelope max_i alpha_i(s).
std::vector<double> envelope(const PwlcFn& f) {
    if (f.empty()) throw ValidationError("bound update needs a nonempty PWLC function");
    std::vector<double> out(f.vectors.front().coeffs);
    for (const auto& v : f.vectors) {
        for (std::size_t s = 0; s < out.size(); ++s) out[s] = std::max(out[s], v.coeffs[s]);
    }
    return out;
}

std::vector<double> qmdp_row(const Pomdp& m, const std::vector<double>& env, int a) {
    const int n = m.num_states();
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) out[s] = m.rho(s, a) + m.discount() * dot(m.trans_row(s, a), env);
    return out;
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
            out.vectors.push_back(std::move(w));
        }
    }
    return out;
}

void check_cap(std::size_t count, const BackupOptions& opts) {
    if (count > opts.max_candidates) {
        throw ResourceError("partitioned update candidate count " + std::to_string(count) + " exceeds cap " +
                            std::to_string(opts.max_candidates));
    }
}

}  // namespace

FiniteMdp underlying_mdp(const Pomdp& m) {
    const int n = m.num_states(), na = m.num_actions();
    FiniteMdp mdp;
    mdp.num_states = n;
    mdp.num_actions = na;
    mdp.discount = m.discount();
    mdp.rows.resize(static_cast<std::size_t>(n) * na);
    mdp.reward.resize(static_cast<std::size_t>(n) * na);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < na; ++a) {
            auto& row = mdp.rows[static_cast<std::size_t>(s) * na + a];
            for (int sp = 0; sp < n; ++sp) {
                if (m.trans(s, a, sp) > 0.0) row.push_back({sp, m.trans(s, a, sp)});
            }
            mdp.reward[static_cast<std::size_t>(s) * na + a] = m.rho(s, a);
        }
    }
    return mdp;
}

QTable solve_fomdp(const Pomdp& m, double eps) {
    if (!(eps > 0.0)) throw ValidationError("solve_fomdp needs eps > 0");
    const MdpSolution sol = solve_mdp(underlying_mdp(m), eps);
    QTable q;
    q.num_states = m.num_states();
    q.num_actions = m.num_actions();
    q.q = sol.q;
    // v recomputed from q so the two agree exactly.
    q.v.assign(static_cast<std::size_t>(q.num_states), kNegInf);
    for (int s = 0; s < q.num_states; ++s) {
        for (int a = 0; a < q.num_actions; ++a) q.v[s] = std::max(q.v[s], q.at(s, a));
    }
    return q;
}

double mdp_value(const QTable& q, const Belief& b, MdpMode mode) {
    if (mode == MdpMode::kMdp) return dot(q.v, b);
    double best = kNegInf;
    for (int a = 0; a < q.num_actions; ++a) {
        double acc = 0.0;
        for (int s = 0; s < q.num_states; ++s) acc += b[s] * q.at(s, a);
        best = std::max(best, acc);
    }
    return best;
}

PwlcFn mdp_pwlc(const QTable& q) {
    PwlcFn f;
    f.vectors.push_back({q.v, -1, {}});
    return f;
}

PwlcFn qmdp_pwlc(const QTable& q) {
    PwlcFn f;
    for (int a = 0; a < q.num_actions; ++a) {
        AlphaVector v;
        v.action = a;
        for (int s = 0; s < q.num_states; ++s) v.coeffs.push_back(q.at(s, a));
        f.vectors.push_back(std::move(v));
    }
    return f;
}

PwlcFn fib_pwlc(const FibTable& t) {
    PwlcFn f;
    for (int a = 0; a < t.num_actions; ++a) {
        AlphaVector v;
        v.action = a;
        for (int s = 0; s < t.num_states; ++s) v.coeffs.push_back(t.at(s, a));
        f.vectors.push_back(std::move(v));
    }
    return f;
}

PwlcFn mdp_backup(const Pomdp& m, const PwlcFn& f) {
    const std::vector<double> env = envelope(f);
    std::vector<double> best(static_cast<std::size_t>(m.num_states()), kNegInf);
    for (int a = 0; a < m.num_actions(); ++a) {
        const auto row = qmdp_row(m, env, a);
        for (std::size_t s = 0; s < best.size(); ++s) best[s] = std::max(best[s], row[s]);
    }
    PwlcFn out;
    out.vectors.push_back({std::move(best), -1, {}});
    return out;
}

PwlcFn qmdp_backup(const Pomdp& m, const PwlcFn& f) {
    const std::vector<double> env = envelope(f);
    PwlcFn out;
    for (int a = 0; a < m.num_actions(); ++a) out.vectors.push_back({qmdp_row(m, env, a), a, {}});
    return out;
}

PwlcFn fib_backup(const Pomdp& m, const PwlcFn& f) {
    if (f.empty()) throw ValidationError("bound update needs a nonempty PWLC function");
    const int n = m.num_states();
    PwlcFn out;
    for (int a = 0; a < m.num_actions(); ++a) {
        AlphaVector v;
        v.action = a;
        v.coeffs.resize(static_cast<std::size_t>(n));
        for (int s = 0; s < n; ++s) {
            double future = 0.0;
            for (int o = 0; o < m.num_obs(); ++o) {
                const auto row = m.joint_row(s, a, o);
                double best = kNegInf;
                for (const auto& alpha : f.vectors) best = std::max(best, dot(row, alpha.coeffs));
                future += best;
            }
            v.coeffs[s] = m.rho(s, a) + m.discount() * future;
        }
        out.vectors.push_back(std::move(v));
    }
    return out;
}

void validate_partition(const Partition& blocks, int num_states) {
    std::vector<int> seen(static_cast<std::size_t>(num_states), 0);
    for (const auto& block : blocks) {
        if (block.empty()) throw ValidationError("partition has an empty block");
        for (int s : block) {
            if (s < 0 || s >= num_states) throw ValidationError("partition names state " + std::to_string(s));
            if (seen[s]++) throw ValidationError("state " + std::to_string(s) + " appears in two blocks");
        }
    }
    for (int s = 0; s < num_states; ++s) {
        if (!seen[s]) throw ValidationError("state " + std::to_string(s) + " is not covered by the partition");
    }
}

PwlcFn partitioned_fib_backup(const Pomdp& m, const PwlcFn& f, const Partition& blocks, const BackupOptions& opts) {
    if (f.empty()) throw ValidationError("bound update needs a nonempty PWLC function");
    const int n = m.num_states();
    validate_partition(blocks, n);
    PwlcFn all;
    for (int a = 0; a < m.num_actions(); ++a) {
        // Per block: cross-sum over observations of projections restricted to the block.
        std::vector<PwlcFn> per_block;
        for (const auto& block : blocks) {
            const int k = static_cast<int>(block.size());
            PwlcFn acc;
            for (int o = 0; o < m.num_obs(); ++o) {
                PwlcFn proj;
                for (const auto& alpha : f.vectors) {
                    AlphaVector v;
                    v.action = a;
                    v.coeffs.resize(static_cast<std::size_t>(k));
                    for (int j = 0; j < k; ++j) {
                        v.coeffs[j] = m.discount() * dot(m.joint_row(block[j], a, o), alpha.coeffs);
                    }
                    proj.vectors.push_back(std::move(v));
                }
                proj = prune(proj, opts.prune_tol);
                if (o == 0) {
                    acc = std::move(proj);
                } else {
                    check_cap(acc.size() * proj.size(), opts);
                    acc = prune(cross_sum(acc, proj), opts.prune_tol);
                }
            }
            per_block.push_back(std::move(acc));
        }

        // Blocks have disjoint supports, so every combination survives; embed and combine.
        PwlcFn combined;
        AlphaVector base;
        base.action = a;
        base.coeffs.resize(static_cast<std::size_t>(n));
        for (int s = 0; s < n; ++s) base.coeffs[s] = m.rho(s, a);
        combined.vectors.push_back(std::move(base));
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            check_cap(combined.size() * per_block[bi].size(), opts);
            PwlcFn next;
            for (const auto& u : combined.vectors) {
                for (const auto& v : per_block[bi].vectors) {
                    AlphaVector w = u;
                    for (std::size_t j = 0; j < blocks[bi].size(); ++j) w.coeffs[blocks[bi][j]] += v.coeffs[j];
                    next.vectors.push_back(std::move(w));
                }
            }
            combined = std::move(next);
        }
        for (auto& v : combined.vectors) all.vectors.push_back(std::move(v));
    }
    return prune(all, opts.prune_tol);
}

PwlcFn umdp_candidates(const Pomdp& m, const PwlcFn& f) {
    if (f.empty()) throw ValidationError("bound update needs a nonempty PWLC function");
    const int n = m.num_states();
    PwlcFn out;
    for (int a = 0; a < m.num_actions(); ++a) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            AlphaVector v;
            v.action = a;
            v.witnesses.assign(static_cast<std::size_t>(m.num_obs()), static_cast<int>(i));
            v.coeffs.resize(static_cast<std::size_t>(n));
            for (int s = 0; s < n; ++s) {
                v.coeffs[s] = m.rho(s, a) + m.discount() * dot(m.trans_row(s, a), f.vectors[i].coeffs);
            }
            out.vectors.push_back(std::move(v));
        }
    }
    return out;
}

PwlcFn umdp_backup(const Pomdp& m, const PwlcFn& f, double tol) { return prune(umdp_candidates(m, f), tol); }

FiniteMdp fib_equivalent_mdp(const Pomdp& m) {
    const int n = m.num_states(), na = m.num_actions(), no = m.num_obs();
    const int total = n * na * no;
    auto index = [&](int s, int a, int o) { return (s * na + a) * no + o; };
    FiniteMdp mdp;
    mdp.num_states = total;
    mdp.num_actions = na;
    mdp.discount = m.discount();
    mdp.rows.resize(static_cast<std::size_t>(total) * na);
    mdp.reward.assign(static_cast<std::size_t>(total) * na, 0.0);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < na; ++a) {
            for (int o = 0; o < no; ++o) {
                const int x = index(s, a, o);
                const auto row = m.joint_row(s, a, o);
                for (int ap = 0; ap < na; ++ap) {
                    const std::size_t slot = static_cast<std::size_t>(x) * na + ap;
                    double r = 0.0;
                    auto& out = mdp.rows[slot];
                    for (int sp = 0; sp < n; ++sp) {
                        if (row[sp] == 0.0) continue;
                        r += row[sp] * m.rho(sp, ap);
                        for (int op = 0; op < no; ++op) out.push_back({index(sp, ap, op), row[sp]});
                    }
                    mdp.reward[slot] = r;
                }
            }
        }
    }
    return mdp;
}

FibTable fib_fixed_point(const Pomdp& m, double eps) {
    if (!(eps > 0.0)) throw ValidationError("fib_fixed_point needs eps > 0");
    const int n = m.num_states(), na = m.num_actions(), no = m.num_obs();
    const double g = m.discount();
    FibTable t;
    t.num_states = n;
    t.num_actions = na;
    t.alpha.assign(static_cast<std::size_t>(n) * na, 0.0);
    if (g == 0.0) {
        for (int s = 0; s < n; ++s) {
            for (int a = 0; a < na; ++a) t.alpha[static_cast<std::size_t>(s) * na + a] = m.rho(s, a);
        }
        return t;
    }
    // alpha(s,a) = rho + g * sum_o v(s,a,o), so a change of d in v moves alpha by at most g*|O|*d.
    const MdpSolution sol = solve_mdp(fib_equivalent_mdp(m), eps / (g * no));
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < na; ++a) {
            double acc = 0.0;
            for (int o = 0; o < no; ++o) acc += sol.values[(static_cast<std::size_t>(s) * na + a) * no + o];
            t.alpha[static_cast<std::size_t>(s) * na + a] = m.rho(s, a) + g * acc;
        }
    }
    t.bellman_error = g * no * sol.bellman_error;
    t.iterations = sol.iterations;
    return t;
}

BoundIteration iterate_update(const PwlcUpdate& update, const PwlcFn& f0, double eps, int max_iters) {
    if (!(eps > 0.0)) throw ValidationError("iterate_update needs eps > 0");
    BoundIteration res;
    res.f = f0;
    res.bellman_error = std::numeric_limits<double>::infinity();
    while (res.iterations < max_iters) {
        PwlcFn next = update(res.f);
        res.bellman_error = pwlc_distance(next, res.f);
        res.f = std::move(next);
        ++res.iterations;
        if (res.bellman_error <= eps) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace pomdp
