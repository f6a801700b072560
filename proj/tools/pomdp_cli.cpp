// Command-line front end: solvers, bounds, simulation and method comparison.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pomdp/bounds.hpp"
#include "pomdp/curve_fit.hpp"
#include "pomdp/errors.hpp"
#include "pomdp/exact_dp.hpp"
#include "pomdp/experiment.hpp"
#include "pomdp/fsm.hpp"
#include "pomdp/grid.hpp"
#include "pomdp/harness.hpp"
#include "pomdp/maze.hpp"
#include "pomdp/model_io.hpp"
#include "pomdp/pointdp.hpp"
#include "pomdp/policy.hpp"
#include "pomdp/serialize.hpp"

using namespace pomdp;
using nlohmann::json;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::string model = "maze20";
    std::string out = "csv";
    std::string save;
    std::size_t max_candidates = BackupOptions{}.max_candidates;
    int beliefs = 2000;
};

Pomdp load(const Globals& g) {
    if (g.model == "maze20") return build_maze20(default_maze20());
    return load_model(g.model);
}

std::vector<Belief> eval_beliefs(const Globals& g, int n) {
    Rng rng = episode_rng(g.seed, 0xbe11efULL);
    return sample_beliefs_uniform(rng, n, g.beliefs);
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// `summary` is a flat object of scalars; `artifact` the full result.
void emit(const Globals& g, const json& summary, const json& artifact) {
    if (!g.save.empty()) write_json_file(artifact, g.save);
    if (g.out == "json") {
        json doc = summary;
        doc["result"] = artifact;
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::cout << "key,value\n";
    for (const auto& [k, v] : summary.items()) {
        std::cout << k << "," << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
}

std::pair<double, double> parse_rate(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ValidationError("rate must look like start:end");
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"POMDP value-function approximation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Master random seed");
    app.add_option("--model", g.model, "Model JSON file, or maze20")->capture_default_str();
    app.add_option("--out", g.out, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--save", g.save, "Write the full result as JSON to this file");
    app.add_option("--max-candidates", g.max_candidates, "Cap on intermediate vector sets in exact backups");
    app.add_option("--beliefs", g.beliefs, "Uniform evaluation beliefs for bound means")->check(CLI::PositiveNumber);

    // solve: exact value iteration
    auto* solve = app.add_subcommand("solve", "Exact value iteration with pruning");
    double solve_eps = 0.01;
    int solve_iters = 500;
    solve->add_option("--eps", solve_eps, "Bellman-error stopping threshold");
    solve->add_option("--max-iters", solve_iters);

    // bound
    auto* bound = app.add_subcommand("bound", "Upper and lower bound methods");
    std::string bound_kind = "fib";
    double bound_eps = 1e-4;
    int bound_iters = 1000;
    std::string partition_spec;
    bound->add_option("--kind", bound_kind)
        ->check(CLI::IsMember({"mdp", "qmdp", "fib", "fib-iter", "partitioned", "umdp", "one-action"}));
    bound->add_option("--eps", bound_eps);
    bound->add_option("--max-iters", bound_iters);
    bound->add_option("--blocks", partition_spec, "Partition for --kind partitioned, e.g. 0,1;2,3");

    // grid
    auto* grid = app.add_subcommand("grid", "Grid-based interpolation upper bounds");
    std::string grid_rule = "sawtooth";
    int grid_points = 400, grid_increment = 40, grid_rounds = 500;
    double grid_eps = 1e-4;
    bool grid_random = false;
    grid->add_option("--rule", grid_rule)->check(CLI::IsMember({"nn", "kernel", "sawtooth", "lp"}));
    grid->add_option("--points", grid_points, "Grid points beyond the extremes");
    grid->add_option("--increment", grid_increment, "Points added per adaptive round");
    grid->add_option("--eps", grid_eps);
    grid->add_option("--max-rounds", grid_rounds);
    grid->add_flag("--random", grid_random, "Uniform random points instead of adaptive growth");

    // pointdp
    auto* pdp = app.add_subcommand("pointdp", "Point-based lower bounds");
    std::string pdp_mode = "incremental", pdp_points = "random:40";
    int pdp_cycles = 10, pdp_len = 2;
    pdp->add_option("--mode", pdp_mode)->check(CLI::IsMember({"standard", "incremental"}));
    pdp->add_option("--points", pdp_points, "fixed:FILE, random:N, heur-extremes or heur-twotier");
    pdp->add_option("--cycles", pdp_cycles);
    pdp->add_option("--sequence", pdp_len, "Simulated sequence length for heur-twotier");

    // lsfit
    auto* lsfit = app.add_subcommand("lsfit", "Least-squares value-function fitting");
    std::string fit_kind = "linq", fit_scheme_name = "sync", fit_rate = "0.2:0.001";
    int fit_epochs = 20, fit_samples = 100;
    lsfit->add_option("--model", fit_kind, "linq or softmax:N,K");
    lsfit->add_option("--scheme", fit_scheme_name)->check(CLI::IsMember({"sync", "gs"}));
    lsfit->add_option("--epochs", fit_epochs);
    lsfit->add_option("--samples", fit_samples);
    lsfit->add_option("--rate", fit_rate, "Linear learning-rate decay start:end");

    // policy-iter
    auto* pi = app.add_subcommand("policy-iter", "Finite-state controller policy iteration");
    int pi_action = -1, pi_rounds = 10, pi_states = 2000;
    double pi_eps = 1e-4;
    pi->add_option("--start-action", pi_action, "One-action start machine (default: best average)");
    pi->add_option("--rounds", pi_rounds);
    pi->add_option("--max-states", pi_states);
    pi->add_option("--eps", pi_eps);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Control quality of a saved value function or controller");
    std::string sim_alpha, sim_fsm, sim_grid, sim_fit, sim_mode = "la";
    int sim_horizon = 60;
    sim->add_option("--alpha", sim_alpha, "Alpha-set JSON");
    sim->add_option("--fsm", sim_fsm, "Controller JSON");
    sim->add_option("--grid", sim_grid, "Grid JSON");
    sim->add_option("--fit", sim_fit, "Fitted model JSON");
    sim->add_option("--mode", sim_mode)->check(CLI::IsMember({"la", "dr", "fsm"}));
    sim->add_option("--horizon", sim_horizon);

    // compare
    auto* cmp = app.add_subcommand("compare", "Method comparison table");
    ExperimentConfig cfg;
    std::string cmp_methods, cmp_modes;
    cmp->add_option("--methods", cmp_methods, "Comma-separated method list");
    cmp->add_option("--modes", cmp_modes, "Comma-separated controller modes (la, dr, fsm)");
    cmp->add_option("--horizon", cfg.horizon);
    cmp->add_option("--grid-points", cfg.settings.grid_points);
    cmp->add_option("--pointdp-cycles", cfg.settings.pointdp_cycles);
    cmp->add_option("--fit-epochs", cfg.settings.fit_epochs);
    cmp->add_option("--softmax-k", cfg.settings.softmax_k);
    cmp->add_option("--softmax-vectors", cfg.settings.softmax_vectors);

    // maze20
    auto* maze = app.add_subcommand("maze20", "Maze benchmark utilities");
    maze->require_subcommand(1);
    auto* emit_cmd = maze->add_subcommand("emit", "Print the maze model as JSON");
    std::string layout;
    bool spec_only = false;
    emit_cmd->add_option("--layout", layout, "Maze spec JSON overriding the defaults");
    emit_cmd->add_flag("--spec", spec_only, "Print the maze spec instead of the model tables");

    CLI11_PARSE(app, argc, argv);

    try {
        BackupOptions opts;
        opts.max_candidates = g.max_candidates;

        if (*maze) {
            const MazeSpec spec = layout.empty() ? default_maze20() : maze_spec_from_json(read_json_file(layout));
            const json doc = spec_only ? maze_spec_to_json(spec) : model_to_json(build_maze20(spec));
            if (!g.save.empty()) write_json_file(doc, g.save);
            std::cout << doc.dump(2) << "\n";
            return 0;
        }

        const Pomdp m = load(g);
        const auto t0 = std::chrono::steady_clock::now();

        if (*solve) {
            const ValueIterationResult r = value_iteration(m, default_initial_pwlc(m), solve_eps, solve_iters, opts);
            const double ms = elapsed_ms(t0);
            const auto beliefs = eval_beliefs(g, m.num_states());
            emit(g,
                 {{"vectors", r.f.size()}, {"iterations", r.iterations}, {"bellman_error", r.bellman_error},
                  {"converged", r.converged}, {"bound_mean", bound_quality([&](const Belief& b) { return r.f(b); }, beliefs)},
                  {"solve_ms", ms}},
                 pwlc_to_json(r.f));
        } else if (*bound) {
            PwlcFn f;
            json artifact, extra = json::object();
            if (bound_kind == "mdp" || bound_kind == "qmdp") {
                const QTable q = solve_fomdp(m, bound_eps);
                f = bound_kind == "mdp" ? mdp_pwlc(q) : qmdp_pwlc(q);
                artifact = qtable_to_json(q);
            } else if (bound_kind == "fib") {
                const FibTable t = fib_fixed_point(m, bound_eps);
                f = fib_pwlc(t);
                artifact = fib_to_json(t);
                extra = {{"iterations", t.iterations}, {"bellman_error", t.bellman_error}};
            } else if (bound_kind == "one-action") {
                f = one_action_lower_bound(m).f;
                artifact = pwlc_to_json(f);
            } else {
                PwlcUpdate update;
                PwlcFn f0;
                if (bound_kind == "fib-iter") {
                    update = [&](const PwlcFn& x) { return fib_backup(m, x); };
                    f0 = qmdp_pwlc(solve_fomdp(m, bound_eps));
                } else if (bound_kind == "partitioned") {
                    Partition blocks;
                    for (const auto& block : split(partition_spec, ';')) {
                        std::vector<int> states;
                        for (const auto& s : split(block, ',')) states.push_back(std::stoi(s));
                        blocks.push_back(states);
                    }
                    validate_partition(blocks, m.num_states());
                    update = [&, blocks](const PwlcFn& x) { return partitioned_fib_backup(m, x, blocks, opts); };
                    f0 = fib_pwlc(fib_fixed_point(m, bound_eps));
                } else {
                    update = [&](const PwlcFn& x) { return umdp_backup(m, x); };
                    f0 = one_action_lower_bound(m).f;
                }
                const BoundIteration it = iterate_update(update, f0, bound_eps, bound_iters);
                f = it.f;
                artifact = pwlc_to_json(f);
                extra = {{"iterations", it.iterations}, {"bellman_error", it.bellman_error}, {"converged", it.converged}};
            }
            const double ms = elapsed_ms(t0);
            json summary{{"kind", bound_kind}, {"vectors", f.size()},
                         {"bound_mean", bound_quality([&](const Belief& b) { return f(b); },
                                                      eval_beliefs(g, m.num_states()))},
                         {"solve_ms", ms}};
            summary.update(extra);
            emit(g, summary, artifact);
        } else if (*grid) {
            Rng rng = episode_rng(g.seed, 1);
            GridValueFn fn;
            json extra = json::object();
            if (!grid_random) {
                if (grid_rule != "sawtooth") throw ValidationError("adaptive growth is implemented for the sawtooth rule");
                AdaptiveGridResult r = adaptive_sawtooth(m, grid_points, grid_increment, grid_eps, grid_rounds, rng);
                fn = std::move(r.fn);
                extra = {{"added", r.added}, {"skipped", r.skipped}};
            } else {
                Grid points = Grid::extremes(m.num_states());
                for (const auto& b : sample_beliefs_uniform(rng, m.num_states(), grid_points)) points.add(b);
                const GridRule rule = parse_grid_rule(grid_rule);
                if (rule == GridRule::kSawtooth) {
                    SawtoothResult r = solve_sawtooth(m, points, grid_eps, grid_rounds);
                    fn = std::move(r.fn);
                    extra = {{"rounds", r.rounds}, {"converged", r.converged}};
                } else {
                    fn.grid = points;
                    fn.rule = rule;
                    fn.values.assign(static_cast<std::size_t>(points.size()), 0.0);
                    const GridSuccessors succ = grid_successors(m, points);
                    if (rule == GridRule::kLp) {
                        int rounds = 0;
                        double change = 0.0;
                        do {
                            auto next = grid_backup(m, fn, succ);
                            change = 0.0;
                            for (std::size_t j = 0; j < next.size(); ++j) {
                                change = std::max(change, std::abs(next[j] - fn.values[j]));
                            }
                            fn.values = std::move(next);
                        } while (++rounds < grid_rounds && change > grid_eps);
                        extra = {{"rounds", rounds}, {"bellman_error", change}};
                    } else {
                        const FiniteMdp mdp = to_grid_mdp(m, points, succ, build_interp_table(fn, succ));
                        fn.values = solve_mdp(mdp, grid_eps).values;
                    }
                }
            }
            const double ms = elapsed_ms(t0);
            json summary{{"rule", grid_rule}, {"grid_size", fn.grid.size()},
                         {"bound_mean", bound_quality([&](const Belief& b) { return fn(b); },
                                                      eval_beliefs(g, m.num_states()))},
                         {"solve_ms", ms}};
            summary.update(extra);
            emit(g, summary, grid_to_json(fn));
        } else if (*pdp) {
            Rng rng = episode_rng(g.seed, 2);
            LowerBoundFn lb = one_action_lower_bound(m);
            std::vector<Belief> fixed;
            if (pdp_points.rfind("fixed:", 0) == 0) {
                fixed = read_json_file(pdp_points.substr(6)).get<std::vector<Belief>>();
                for (const auto& b : fixed) validate_belief(b, m.num_states());
            }
            std::vector<double> means;
            const auto beliefs = eval_beliefs(g, m.num_states());
            int added = 0;
            for (int cycle = 0; cycle < pdp_cycles; ++cycle) {
                std::vector<Belief> pts;
                if (!fixed.empty()) {
                    pts = fixed;
                } else if (pdp_points.rfind("random:", 0) == 0) {
                    pts = sample_beliefs_uniform(rng, m.num_states(), std::stoi(pdp_points.substr(7)));
                } else if (pdp_points == "heur-extremes") {
                    pts = order_extremes(m, lb.f);
                } else if (pdp_points == "heur-twotier") {
                    pts = two_tier_points(m, lb.f, pdp_len, rng);
                } else {
                    throw ValidationError("unknown point source: " + pdp_points);
                }
                if (pdp_mode == "standard") {
                    lb.f = gl_update(m, lb.f, pts);
                    lb.certified = false;
                } else {
                    const IncrementalResult r = incremental_update(m, lb, pts);
                    lb = r.lb;
                    added += r.added;
                }
                means.push_back(bound_quality([&](const Belief& b) { return lb.f(b); }, beliefs));
            }
            emit(g,
                 {{"mode", pdp_mode}, {"vectors", lb.f.size()}, {"certified", lb.certified}, {"added", added},
                  {"bound_mean", means.empty() ? bound_quality([&](const Belief& b) { return lb.f(b); }, beliefs)
                                               : means.back()},
                  {"solve_ms", elapsed_ms(t0)}},
                 {{"vectors", pwlc_to_json(lb.f)["vectors"]}, {"mean_per_cycle", means}});
        } else if (*lsfit) {
            Rng rng = episode_rng(g.seed, 3);
            FitConfig fc;
            fc.scheme = fit_scheme_name == "sync" ? FitScheme::kSynchronous : FitScheme::kGaussSeidel;
            fc.epochs = fit_epochs;
            const auto [r0, r1] = parse_rate(fit_rate);
            fc.rate = {r0, r1};
            fc.probes = sample_beliefs_uniform(rng, m.num_states(), 200);
            double shift = 0.0;
            FitModel init;
            Pomdp fit_model = m;
            if (fit_kind == "linq") {
                init = linear_q_from_pwlc(qmdp_pwlc(solve_fomdp(m, 1e-6)), m.num_actions());
            } else if (fit_kind.rfind("softmax", 0) == 0) {
                int count = 10;
                double k = kDefaultSoftmaxK;
                if (fit_kind.size() > 8 && fit_kind[7] == ':') {
                    const auto parts = split(fit_kind.substr(8), ',');
                    if (!parts.empty()) count = std::stoi(parts[0]);
                    if (parts.size() > 1) k = std::stod(parts[1]);
                }
                shift = softmax_reward_shift(m);
                if (shift > 0.0) fit_model = shift_rewards(m, shift);
                init = softmax_from_pwlc(qmdp_pwlc(solve_fomdp(fit_model, 1e-6)), count, k, rng);
            } else {
                throw ValidationError("model kind must be linq or softmax:N,K");
            }
            const auto samples = sample_beliefs_uniform(rng, m.num_states(), fit_samples);
            const FitResult r = fit_scheme(fit_model, init, samples, fc, rng);
            const double offset = shift / (1.0 - m.discount());
            const double mean =
                bound_quality([&](const Belief& b) { return fit_value(r.model, b) - offset; }, eval_beliefs(g, m.num_states()));
            if (r.diverged) std::cerr << "warning: fit diverged; returning the last finite model\n";
            json artifact = fit_model_to_json(r.model);
            artifact["reward_shift"] = shift;
            artifact["probe_error"] = r.probe_error;
            emit(g,
                 {{"model", fit_kind}, {"scheme", fit_scheme_name}, {"epochs_run", r.epochs_run},
                  {"diverged", r.diverged}, {"reward_shift", shift}, {"value_mean", mean},
                  {"probe_error", r.probe_error.empty() ? 0.0 : r.probe_error.back()}, {"solve_ms", elapsed_ms(t0)}},
                 artifact);
        } else if (*pi) {
            int start = pi_action;
            if (start < 0) {
                double best = -std::numeric_limits<double>::infinity();
                for (int a = 0; a < m.num_actions(); ++a) {
                    const FsmController c = evaluate_fsm(m, make_one_action_fsm(m, a));
                    double mean = 0.0;
                    for (double v : c.values[0]) mean += v;
                    if (mean > best) {
                        best = mean;
                        start = a;
                    }
                }
            }
            const PolicyIterationResult r =
                policy_iteration(m, evaluate_fsm(m, make_one_action_fsm(m, start)), pi_eps, pi_rounds, pi_states, opts);
            const FsmController& c = r.controller;
            emit(g,
                 {{"states", c.size()}, {"rounds", r.rounds}, {"last_gain", r.last_gain}, {"hit_cap", r.hit_cap},
                  {"bound_mean", bound_quality([&](const Belief& b) { return fsm_value(c, b).value; },
                                               eval_beliefs(g, m.num_states()))},
                  {"solve_ms", elapsed_ms(t0)}},
                 fsm_to_json(c));
        } else if (*sim) {
            const int given = !sim_alpha.empty() + !sim_fsm.empty() + !sim_grid.empty() + !sim_fit.empty();
            if (given != 1) throw ValidationError("simulate needs exactly one of --alpha, --fsm, --grid, --fit");
            std::unique_ptr<Policy> policy;
            std::optional<PwlcFn> alpha;
            std::optional<GridValueFn> gfn;
            std::optional<FitModel> fit;
            if (!sim_fsm.empty()) {
                FsmController c = fsm_from_json(read_json_file(sim_fsm));
                validate_fsm(m, c);
                if (!c.evaluated()) c = evaluate_fsm(m, c);
                if (sim_mode == "fsm") policy = std::make_unique<FsmModePolicy>(c);
                if (sim_mode == "dr") policy = make_fsm_direct_policy(m, c);
                if (sim_mode == "la") policy = make_fsm_lookahead_policy(m, c);
            } else if (sim_mode == "fsm") {
                throw ValidationError("fsm mode needs --fsm");
            } else if (!sim_alpha.empty()) {
                alpha = pwlc_from_json(read_json_file(sim_alpha));
                if (sim_mode == "dr") {
                    policy = std::make_unique<DirectPolicy>(m, *alpha);
                } else {
                    policy = std::make_unique<LookaheadPolicy>(make_pwlc_lookahead(m, *alpha));
                }
            } else {
                if (sim_mode == "dr") throw ValidationError("direct mode needs an action-tagged alpha set");
                ValueFn value;
                std::int64_t cost = 0;
                if (!sim_grid.empty()) {
                    gfn = grid_from_json(read_json_file(sim_grid));
                    value = [&](const Belief& b) { return (*gfn)(b); };
                    cost = gfn->grid.size();
                } else {
                    const json doc = read_json_file(sim_fit);
                    fit = fit_model_from_json(doc);
                    const double offset = doc.value("reward_shift", 0.0) / (1.0 - m.discount());
                    value = [&, offset](const Belief& b) { return fit_value(*fit, b) - offset; };
                    cost = fit_value_cost(*fit);
                }
                policy = std::make_unique<LookaheadPolicy>(m, value, cost);
            }
            const auto starts = eval_beliefs(g, m.num_states());
            const ControlResult r = control_quality(m, *policy, starts, sim_horizon, g.seed);
            emit(g,
                 {{"mode", sim_mode}, {"episodes", r.returns.size()}, {"horizon", sim_horizon},
                  {"control_mean", r.mean}, {"control_se", r.std_error},
                  {"decision_ops", r.ops_per_decision(m.num_states())}},
                 {{"returns", r.returns}});
        } else if (*cmp) {
            cfg.seed = g.seed;
            cfg.n_beliefs = g.beliefs;
            if (!cmp_methods.empty()) cfg.methods = split(cmp_methods, ',');
            if (!cmp_modes.empty()) cfg.modes = split(cmp_modes, ',');
            cfg.header = g.model == "maze20" ? maze_header(default_maze20())
                                             : std::vector<std::string>{"model=" + g.model};
            const ComparisonReport r = run_comparison(m, cfg);
            if (!g.save.empty()) write_json_file(r.to_json(), g.save);
            if (g.out == "json") {
                std::cout << r.to_json().dump(2) << "\n";
            } else {
                std::cout << r.to_csv();
            }
            return r.failures.empty() ? 0 : 3;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
