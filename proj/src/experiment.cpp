#include "pomdp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>

#include "pomdp/bounds.hpp"
#include "pomdp/curve_fit.hpp"
#include "pomdp/errors.hpp"
#include "pomdp/grid.hpp"
#include "pomdp/harness.hpp"
#include "pomdp/pointdp.hpp"
#include "pomdp/policy.hpp"

namespace pomdp {

namespace {

// Stream index for the shared evaluation beliefs; method streams hash their name.
constexpr std::uint64_t kBeliefStream = 0xbe11efULL;

std::uint64_t name_stream(const std::string& name) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

SolvedMethod from_pwlc(PwlcFn f, bool tagged) {
    SolvedMethod out;
    out.value_cost = static_cast<std::int64_t>(f.size());
    if (tagged) out.tagged = f;
    out.value = [f = std::move(f)](const Belief& b) { return eval_pwlc(f, b).value; };
    return out;
}

SolvedMethod solve_mdp_method(const Pomdp& m, const MethodSettings& s, Rng&) {
    const QTable q = solve_fomdp(m, s.eps);
    return from_pwlc(mdp_pwlc(q), false);
}

SolvedMethod solve_qmdp_method(const Pomdp& m, const MethodSettings& s, Rng&) {
    return from_pwlc(qmdp_pwlc(solve_fomdp(m, s.eps)), true);
}

SolvedMethod solve_fib_method(const Pomdp& m, const MethodSettings& s, Rng&) {
    return from_pwlc(fib_pwlc(fib_fixed_point(m, s.eps)), true);
}

SolvedMethod solve_sawtooth_method(const Pomdp& m, const MethodSettings& s, Rng& rng) {
    AdaptiveGridResult res = adaptive_sawtooth(m, s.grid_points, s.grid_increment, s.eps, s.max_rounds, rng);
    SolvedMethod out;
    out.value_cost = static_cast<std::int64_t>(res.fn.grid.size());
    out.value = [fn = std::move(res.fn)](const Belief& b) { return fn(b); };
    return out;
}

SolvedMethod solve_pointdp_method(const Pomdp& m, const MethodSettings& s, Rng& rng) {
    LowerBoundFn lb = one_action_lower_bound(m);
    for (int cycle = 0; cycle < s.pointdp_cycles; ++cycle) {
        lb = incremental_update(m, lb, sample_beliefs_uniform(rng, m.num_states(), s.pointdp_points)).lb;
    }
    return from_pwlc(lb.f, true);
}

SolvedMethod solve_linq(const Pomdp& m, const MethodSettings& s, Rng& rng, FitScheme scheme) {
    const PwlcFn seed = qmdp_pwlc(solve_fomdp(m, s.eps));
    const auto samples = sample_beliefs_uniform(rng, m.num_states(), s.fit_samples);
    FitConfig cfg;
    cfg.scheme = scheme;
    cfg.epochs = scheme == FitScheme::kSynchronous ? s.fit_epochs : 150;
    const FitResult res = fit_scheme(m, linear_q_from_pwlc(seed, m.num_actions()), samples, cfg, rng);
    return from_pwlc(std::get<LinearQModel>(res.model).as_pwlc(), true);
}

SolvedMethod solve_softmax_method(const Pomdp& m, const MethodSettings& s, Rng& rng) {
    const double shift = softmax_reward_shift(m);
    const Pomdp fit_model = shift > 0.0 ? shift_rewards(m, shift) : m;
    const PwlcFn seed = qmdp_pwlc(solve_fomdp(fit_model, s.eps));
    const auto samples = sample_beliefs_uniform(rng, m.num_states(), s.fit_samples);
    FitConfig cfg;
    cfg.scheme = FitScheme::kGaussSeidel;
    cfg.epochs = 150;
    const SoftmaxModel init = softmax_from_pwlc(seed, s.softmax_vectors, s.softmax_k, rng);
    const FitResult res = fit_scheme(fit_model, init, samples, cfg, rng);
    const double offset = shift / (1.0 - m.discount());
    SolvedMethod out;
    out.value_cost = s.softmax_vectors;
    out.value = [mdl = std::get<SoftmaxModel>(res.model), offset](const Belief& b) {
        return softmax_eval(mdl, b) - offset;
    };
    return out;
}

SolvedMethod solve_fsm_method(const Pomdp& m, const MethodSettings& s, Rng&) {
    // Start from the one-action machine with the best average value over the extremes.
    FsmController best;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < m.num_actions(); ++a) {
        FsmController c = evaluate_fsm(m, make_one_action_fsm(m, a));
        double mean = 0.0;
        for (double v : c.values[0]) mean += v;
        if (mean > best_mean) {
            best_mean = mean;
            best = std::move(c);
        }
    }
    const PolicyIterationResult res = policy_iteration(m, best, s.eps, s.fsm_rounds, s.fsm_max_states);
    SolvedMethod out;
    out.value_cost = static_cast<std::int64_t>(res.controller.size());
    out.fsm = res.controller;
    out.value = [c = res.controller](const Belief& b) { return fsm_value(c, b).value; };
    return out;
}

const std::map<std::string, MethodSolver>& registry() {
    static const std::map<std::string, MethodSolver> methods{
        {"mdp", solve_mdp_method},
        {"qmdp", solve_qmdp_method},
        {"fib", solve_fib_method},
        {"sawtooth-grid", solve_sawtooth_method},
        {"incremental-pointdp", solve_pointdp_method},
        {"linq", [](const Pomdp& m, const MethodSettings& s, Rng& r) {
             return solve_linq(m, s, r, FitScheme::kSynchronous);
         }},
        {"linq-gs", [](const Pomdp& m, const MethodSettings& s, Rng& r) {
             return solve_linq(m, s, r, FitScheme::kGaussSeidel);
         }},
        {"softmax", solve_softmax_method},
        {"fsm", solve_fsm_method},
    };
    return methods;
}

std::unique_ptr<Policy> make_policy(const Pomdp& m, const SolvedMethod& sm, const std::string& mode) {
    if (sm.fsm) {
        if (mode == "fsm") return std::make_unique<FsmModePolicy>(*sm.fsm);
        if (mode == "dr") return make_fsm_direct_policy(m, *sm.fsm);
        if (mode == "la") return make_fsm_lookahead_policy(m, *sm.fsm);
        return nullptr;
    }
    if (mode == "la") return std::make_unique<LookaheadPolicy>(m, sm.value, sm.value_cost);
    if (mode == "dr" && sm.tagged) return std::make_unique<DirectPolicy>(m, *sm.tagged);
    return nullptr;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

std::string fmt_num(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

std::vector<std::string> known_methods() {
    std::vector<std::string> out;
    for (const auto& [name, solver] : registry()) out.push_back(name);
    return out;
}

MethodSolver method_solver(const std::string& name) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw ValidationError("unknown method: " + name);
    return it->second;
}

std::vector<std::string> maze_header(const MazeSpec& spec) {
    return {"discount=" + fmt_num(spec.discount), "reward_move=" + fmt_num(spec.reward_move),
            "reward_sense=" + fmt_num(spec.reward_sense), "reward_target=" + fmt_num(spec.reward_target)};
}

ComparisonReport run_comparison(const Pomdp& m, const ExperimentConfig& cfg) {
    if (cfg.n_beliefs < 1 || cfg.horizon < 1) throw ValidationError("belief count and horizon must be positive");
    for (const auto& name : cfg.methods) method_solver(name);

    ComparisonReport report;
    const std::string discount = "discount=" + fmt_num(m.discount());
    if (std::find(cfg.header.begin(), cfg.header.end(), discount) == cfg.header.end()) {
        report.header.push_back(discount);
    }
    report.header.insert(report.header.end(), cfg.header.begin(), cfg.header.end());
    report.header.push_back("beliefs=" + std::to_string(cfg.n_beliefs) + " horizon=" + std::to_string(cfg.horizon) +
                            " seed=" + std::to_string(cfg.seed));

    Rng belief_rng = episode_rng(cfg.seed, kBeliefStream);
    const auto beliefs = sample_beliefs_uniform(belief_rng, m.num_states(), cfg.n_beliefs);

    for (const auto& name : cfg.methods) {
        try {
            Rng rng = episode_rng(cfg.seed, name_stream(name));
            const auto t0 = std::chrono::steady_clock::now();
            const SolvedMethod sm = method_solver(name)(m, cfg.settings, rng);
            const double solve_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            const double bound = bound_quality(sm.value, beliefs);
            for (const auto& mode : cfg.modes) {
                auto policy = make_policy(m, sm, mode);
                if (!policy) continue;
                const ControlResult cr = control_quality(m, *policy, beliefs, cfg.horizon, cfg.seed);
                report.rows.push_back(
                    {name, mode, bound, cr.mean, cr.std_error, solve_ms, cr.ops_per_decision(m.num_states())});
            }
        } catch (const std::exception& e) {
            report.failures.emplace_back(name, e.what());
        }
    }
    return report;
}

std::string ComparisonReport::to_csv() const {
    std::ostringstream os;
    for (const auto& line : header) os << "# " << line << "\n";
    for (const auto& [method, msg] : failures) os << "# failed " << method << ": " << msg << "\n";
    os << "method,mode,bound_mean,control_mean,control_se,solve_ms,decision_ops\n";
    for (const auto& r : rows) {
        os << r.method << "," << r.mode << "," << fmt(r.bound_mean) << "," << fmt(r.control_mean) << ","
           << fmt(r.control_se) << "," << fmt(r.solve_ms) << "," << fmt(r.decision_ops) << "\n";
    }
    return os.str();
}

nlohmann::json ComparisonReport::to_json() const {
    nlohmann::json doc;
    doc["header"] = header;
    doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        doc["rows"].push_back({{"method", r.method},
                               {"mode", r.mode},
                               {"bound_mean", r.bound_mean},
                               {"control_mean", r.control_mean},
                               {"control_se", r.control_se},
                               {"solve_ms", r.solve_ms},
                               {"decision_ops", r.decision_ops}});
    }
    doc["failures"] = nlohmann::json::array();
    for (const auto& [method, msg] : failures) doc["failures"].push_back({{"method", method}, {"error", msg}});
    return doc;
}

}  // namespace pomdp
