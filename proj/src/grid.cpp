#include "pomdp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pomdp/bounds.hpp"
#include "pomdp/errors.hpp"
#include "pomdp/exact_dp.hpp"
#include "pomdp/lp.hpp"

namespace pomdp {

namespace {

double sq_dist(const Belief& x, const Belief& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
    return acc;
}

double max_dist(const Belief& x, const Belief& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc = std::max(acc, std::abs(x[i] - y[i]));
    return acc;
}

std::vector<double> extreme_values(const GridValueFn& g) {
    const int n = g.grid.num_states();
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        const int j = g.grid.extreme_index(s);
        if (j < 0) throw ValidationError("sawtooth interpolation needs every extreme belief in the grid");
        out[s] = g.values[j];
    }
    return out;
}

// Best interior point for the sawtooth rule: index (-1 = pure extremes) and its coefficient.
struct SawtoothPick {
    double value;
    int index;
    double coef;
};

SawtoothPick sawtooth_pick(const GridValueFn& g, const std::vector<double>& ve, const Belief& b) {
    double base = 0.0;
    for (std::size_t s = 0; s < b.size(); ++s) base += b[s] * ve[s];
    SawtoothPick best{base, -1, 0.0};
    for (int j = 0; j < g.grid.size(); ++j) {
        const auto& sup = g.grid.support(j);
        if (sup.size() <= 1) continue;  // extremes contribute the base plane
        double c = std::numeric_limits<double>::infinity();
        double plane = 0.0;
        for (const auto& [s, w] : sup) {
            c = std::min(c, b[s] / w);
            plane += w * ve[s];
        }
        if (c <= 0.0) continue;
        const double gap = g.values[j] - plane;
        if (gap >= 0.0) continue;
        const double v = base + c * gap;
        if (v < best.value) best = {v, j, c};
    }
    return best;
}

}  // namespace

Grid::Grid(int num_states, const std::vector<Belief>& points) : Grid(num_states) {
    for (const auto& b : points) {
        validate_belief(b, num_states);
        if (find(b) >= 0) throw ValidationError("grid contains duplicate points");
        add(b);
    }
}

Grid Grid::extremes(int num_states) {
    Grid g(num_states);
    for (int s = 0; s < num_states; ++s) g.add(extreme_belief(num_states, s));
    return g;
}

bool Grid::contains_extremes() const {
    return std::all_of(extreme_.begin(), extreme_.end(), [](int j) { return j >= 0; });
}

int Grid::find(const Belief& b, double tol) const {
    for (int j = 0; j < size(); ++j) {
        if (max_dist(points_[j], b) <= tol) return j;
    }
    return -1;
}

int Grid::add(const Belief& b) {
    if (static_cast<int>(b.size()) != n_) throw ValidationError("grid point has the wrong dimension");
    const int found = find(b);
    if (found >= 0) return found;
    points_.push_back(b);
    std::vector<std::pair<int, double>> sup;
    for (int s = 0; s < n_; ++s) {
        if (b[s] > 0.0) sup.push_back({s, b[s]});
    }
    const int j = size() - 1;
    if (sup.size() == 1 && extreme_[sup[0].first] < 0) extreme_[sup[0].first] = j;
    support_.push_back(std::move(sup));
    return j;
}

const char* grid_rule_name(GridRule r) {
    switch (r) {
        case GridRule::kNearest: return "nn";
        case GridRule::kKernel: return "kernel";
        case GridRule::kSawtooth: return "sawtooth";
        case GridRule::kLp: return "lp";
    }
    return "?";
}

GridRule parse_grid_rule(const std::string& name) {
    if (name == "nn") return GridRule::kNearest;
    if (name == "kernel") return GridRule::kKernel;
    if (name == "sawtooth") return GridRule::kSawtooth;
    if (name == "lp") return GridRule::kLp;
    throw ValidationError("unknown grid rule '" + name + "'");
}

double GridValueFn::operator()(const Belief& b) const {
    switch (rule) {
        case GridRule::kNearest: return nn_eval(*this, b);
        case GridRule::kKernel: return kernel_eval(*this, b);
        case GridRule::kSawtooth: return sawtooth_eval(*this, b);
        case GridRule::kLp: return best_interp_lp(grid, values, b).value;
    }
    return 0.0;
}

double nn_eval(const GridValueFn& g, const Belief& b) { return g.values[interp_weights(g, b).front().first]; }

double kernel_eval(const GridValueFn& g, const Belief& b) {
    double acc = 0.0;
    for (const auto& [j, w] : interp_weights(g, b)) acc += w * g.values[j];
    return acc;
}

double sawtooth_eval(const GridValueFn& g, const Belief& b) { return sawtooth_pick(g, extreme_values(g), b).value; }

LpInterp best_interp_lp(const Grid& grid, const std::vector<double>& values, const Belief& b) {
    if (!grid.contains_extremes()) throw ValidationError("interpolation LP needs every extreme belief in the grid");
    const int n = grid.num_states(), k = grid.size();
    std::vector<std::vector<double>> A;
    std::vector<double> rhs;
    for (int s = 0; s < n; ++s) {
        std::vector<double> row(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) row[j] = grid.point(j)[s];
        std::vector<double> neg(row);
        for (double& x : neg) x = -x;
        A.push_back(std::move(row));
        rhs.push_back(b[s]);
        A.push_back(std::move(neg));
        rhs.push_back(-b[s]);
    }
    std::vector<double> c(values.begin(), values.end());
    for (double& x : c) x = -x;
    const lp::Result res = lp::maximize(A, rhs, c);
    if (res.status != lp::Status::kOptimal) throw LpError("interpolation LP failed with the extremes present");
    LpInterp out;
    out.lambda = res.x;
    double sum = 0.0;
    for (double& x : out.lambda) {
        x = std::max(x, 0.0);
        sum += x;
    }
    for (double& x : out.lambda) x /= sum;
    out.value = 0.0;
    for (int j = 0; j < k; ++j) out.value += out.lambda[j] * values[j];
    return out;
}

InterpWeights interp_weights(const GridValueFn& g, const Belief& b) {
    const int k = g.grid.size();
    if (k == 0) throw ValidationError("empty grid");
    InterpWeights out;
    switch (g.rule) {
        case GridRule::kNearest: {
            int best = 0;
            double bd = sq_dist(g.grid.point(0), b);
            for (int j = 1; j < k; ++j) {
                const double d = sq_dist(g.grid.point(j), b);
                if (d < bd) {
                    bd = d;
                    best = j;
                }
            }
            out.push_back({best, 1.0});
            break;
        }
        case GridRule::kKernel: {
            if (!(g.sigma > 0.0)) throw ValidationError("kernel width must be positive");
            std::vector<double> d(static_cast<std::size_t>(k));
            double dmin = std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                d[j] = sq_dist(g.grid.point(j), b);
                dmin = std::min(dmin, d[j]);
            }
            double sum = 0.0;
            for (int j = 0; j < k; ++j) {
                d[j] = std::exp(-(d[j] - dmin) / (2.0 * g.sigma * g.sigma));
                sum += d[j];
            }
            for (int j = 0; j < k; ++j) out.push_back({j, d[j] / sum});
            break;
        }
        case GridRule::kSawtooth: {
            const std::vector<double> ve = extreme_values(g);
            const SawtoothPick pick = sawtooth_pick(g, ve, b);
            const int n = g.grid.num_states();
            std::vector<double> rest(b);
            if (pick.index >= 0) {
                out.push_back({pick.index, pick.coef});
                for (const auto& [s, w] : g.grid.support(pick.index)) rest[s] = std::max(0.0, rest[s] - pick.coef * w);
            }
            for (int s = 0; s < n; ++s) {
                if (rest[s] > 0.0) out.push_back({g.grid.extreme_index(s), rest[s]});
            }
            break;
        }
        case GridRule::kLp: {
            const LpInterp lpres = best_interp_lp(g.grid, g.values, b);
            for (int j = 0; j < k; ++j) {
                if (lpres.lambda[j] > 0.0) out.push_back({j, lpres.lambda[j]});
            }
            break;
        }
    }
    return out;
}

void extend_successors(const Pomdp& m, const Grid& grid, GridSuccessors& succ) {
    const int na = m.num_actions();
    succ.num_actions = na;
    const int done = static_cast<int>(succ.rewards.size()) / std::max(na, 1);
    for (int j = done; j < grid.size(); ++j) {
        const Belief& b = grid.point(j);
        for (int a = 0; a < na; ++a) {
            const Belief pred = predict(m, b, a);
            std::vector<GridSuccessors::Branch> branches;
            for (int o = 0; o < m.num_obs(); ++o) {
                double p = 0.0;
                for (int sp = 0; sp < m.num_states(); ++sp) p += m.obs(a, sp, o) * pred[sp];
                GridSuccessors::Branch br{o, p, {}};
                if (p <= kImpossibleObsTol || !belief_update_from_prediction(m, pred, a, o, br.next)) continue;
                branches.push_back(std::move(br));
            }
            succ.branches.push_back(std::move(branches));
            succ.rewards.push_back(expected_reward(m, b, a));
        }
    }
}

GridSuccessors grid_successors(const Pomdp& m, const Grid& grid) {
    GridSuccessors succ;
    extend_successors(m, grid, succ);
    return succ;
}

std::vector<double> grid_backup(const Pomdp& m, const GridValueFn& g) {
    return grid_backup(m, g, grid_successors(m, g.grid));
}

std::vector<double> grid_backup(const Pomdp& m, const GridValueFn& g, const GridSuccessors& succ) {
    std::vector<double> out(static_cast<std::size_t>(g.grid.size()));
    for (int j = 0; j < g.grid.size(); ++j) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < m.num_actions(); ++a) {
            double future = 0.0;
            for (const auto& br : succ.at(j, a)) future += br.prob * g(br.next);
            best = std::max(best, succ.rewards[static_cast<std::size_t>(j) * m.num_actions() + a] +
                                      m.discount() * future);
        }
        out[j] = best;
    }
    return out;
}

InterpTable build_interp_table(const GridValueFn& g, const GridSuccessors& succ) {
    InterpTable t;
    t.num_actions = succ.num_actions;
    t.weights.reserve(succ.branches.size());
    for (const auto& branches : succ.branches) {
        std::vector<InterpWeights> row;
        row.reserve(branches.size());
        for (const auto& br : branches) row.push_back(interp_weights(g, br.next));
        t.weights.push_back(std::move(row));
    }
    return t;
}

FiniteMdp to_grid_mdp(const Pomdp& m, const Grid& grid, const GridSuccessors& succ, const InterpTable& table) {
    const int k = grid.size(), na = m.num_actions();
    if (static_cast<int>(table.weights.size()) < k * na || static_cast<int>(succ.branches.size()) < k * na) {
        throw ValidationError("interpolation table does not cover the grid");
    }
    FiniteMdp mdp;
    mdp.num_states = k;
    mdp.num_actions = na;
    mdp.discount = m.discount();
    mdp.rows.resize(static_cast<std::size_t>(k) * na);
    mdp.reward.resize(static_cast<std::size_t>(k) * na);
    std::vector<double> dense(static_cast<std::size_t>(k), 0.0);
    std::vector<int> touched;
    for (int j = 0; j < k; ++j) {
        for (int a = 0; a < na; ++a) {
            const std::size_t slot = static_cast<std::size_t>(j) * na + a;
            const auto& branches = succ.branches[slot];
            const auto& weights = table.weights[slot];
            if (weights.size() != branches.size()) throw ValidationError("interpolation table shape mismatch");
            for (std::size_t i = 0; i < branches.size(); ++i) {
                double total = 0.0;
                for (const auto& [idx, w] : weights[i]) {
                    if (idx < 0 || idx >= k) throw ValidationError("interpolation weight names a missing grid point");
                    if (w < -1e-9) throw ValidationError("negative interpolation weight");
                    total += w;
                    if (dense[idx] == 0.0) touched.push_back(idx);
                    dense[idx] += branches[i].prob * w;
                }
                if (std::abs(total - 1.0) > 1e-9) throw ValidationError("interpolation weights do not sum to one");
            }
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            for (int idx : touched) {
                if (dense[idx] > 0.0) mdp.rows[slot].push_back({idx, dense[idx]});
                dense[idx] = 0.0;
            }
            touched.clear();
            mdp.reward[slot] = succ.rewards[slot];
        }
    }
    return mdp;
}

SawtoothResult solve_sawtooth(const Pomdp& m, const Grid& grid, double eps, int max_rounds,
                              const std::vector<double>* warm_start, GridSuccessors* succ) {
    if (!(eps > 0.0)) throw ValidationError("solve_sawtooth needs eps > 0");
    if (!grid.contains_extremes()) throw ValidationError("sawtooth grid needs every extreme belief");
    GridSuccessors local;
    GridSuccessors& cache = succ ? *succ : local;
    extend_successors(m, grid, cache);

    SawtoothResult res;
    res.fn.grid = grid;
    res.fn.rule = GridRule::kSawtooth;
    if (warm_start) {
        if (static_cast<int>(warm_start->size()) != grid.size()) throw ValidationError("warm start size mismatch");
        res.fn.values = *warm_start;
    } else {
        const QTable q = solve_fomdp(m, eps * (1.0 - m.discount()));
        res.fn.values.resize(static_cast<std::size_t>(grid.size()));
        for (int j = 0; j < grid.size(); ++j) res.fn.values[j] = dot(q.v, grid.point(j));
    }
    const double inner = eps * (1.0 - m.discount());
    while (res.rounds < max_rounds) {
        const InterpTable table = build_interp_table(res.fn, cache);
        const FiniteMdp mdp = to_grid_mdp(m, grid, cache, table);
        const MdpSolution sol = solve_mdp(mdp, inner, 100000, &res.fn.values);
        double change = 0.0;
        for (int j = 0; j < grid.size(); ++j) change = std::max(change, std::abs(sol.values[j] - res.fn.values[j]));
        res.fn.values = sol.values;
        ++res.rounds;
        res.last_change = change;
        if (change < eps) {
            res.converged = true;
            break;
        }
    }
    return res;
}

ExpandResult adaptive_expand(const Pomdp& m, const GridValueFn& g, Rng& rng, int max_steps) {
    const int n = m.num_states();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ExpandResult out;
    auto known = [&](const Belief& b) {
        if (g.grid.find(b, kGridMemberTol) >= 0) return true;
        return std::any_of(out.points.begin(), out.points.end(),
                           [&](const Belief& p) { return max_dist(p, b) <= kGridMemberTol; });
    };
    const ValueFn value = [&g](const Belief& b) { return g(b); };
    for (int s = 0; s < n; ++s) {
        Belief b = extreme_belief(n, s);
        bool found = false;
        for (int step = 0; step < max_steps; ++step) {
            const int a = lookahead_action(m, value, b).action;
            const std::vector<double> probs = obs_prob(m, b, a);
            const int o = sample_index(probs, unif(rng));
            b = belief_update(m, b, a, o);
            if (!known(b)) {
                out.points.push_back(b);
                found = true;
                break;
            }
        }
        if (!found) ++out.skipped;
    }
    return out;
}

AdaptiveGridResult adaptive_sawtooth(const Pomdp& m, int total, int increment, double eps, int max_rounds, Rng& rng,
                                     const std::vector<Belief>* probe) {
    if (increment < 1) throw ValidationError("grid increment must be positive");
    GridSuccessors cache;
    Grid grid = Grid::extremes(m.num_states());
    SawtoothResult solved = solve_sawtooth(m, grid, eps, max_rounds, nullptr, &cache);
    AdaptiveGridResult res;
    auto record = [&]() {
        if (!probe) return;
        double acc = 0.0;
        for (const auto& b : *probe) acc += solved.fn(b);
        res.mean_history.push_back(acc / static_cast<double>(probe->size()));
    };
    record();
    while (res.added < total) {
        GridValueFn cur = solved.fn;
        const int target = std::min(increment, total - res.added);
        int batch = 0;
        while (batch < target) {
            const ExpandResult ex = adaptive_expand(m, cur, rng);
            res.skipped += ex.skipped;
            int fresh = 0;
            for (const auto& b : ex.points) {
                if (batch >= target) break;
                if (cur.grid.find(b) >= 0) continue;
                // New points start at the current interpolated value, which is still an upper bound.
                const double v = cur(b);
                cur.grid.add(b);
                cur.values.push_back(v);
                ++batch;
                ++fresh;
            }
            if (fresh == 0) break;
        }
        if (batch == 0) break;
        res.added += batch;
        solved = solve_sawtooth(m, cur.grid, eps, max_rounds, &cur.values, &cache);
        record();
    }
    res.fn = solved.fn;
    return res;
}

}  // namespace pomdp
