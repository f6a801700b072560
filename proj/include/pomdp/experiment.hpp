#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pomdp/exact_dp.hpp"
#include "pomdp/fsm.hpp"
#include "pomdp/maze.hpp"
#include "pomdp/model.hpp"
#include "pomdp/pwlc.hpp"

namespace pomdp {

/// Solver knobs shared by the comparison methods.
struct MethodSettings {
    double eps = 1e-4;
    int max_rounds = 500;
    int grid_points = 400;
    int grid_increment = 40;
    int pointdp_cycles = 10;
    int pointdp_points = 40;
    int fit_samples = 100;
    int fit_epochs = 20;
    int softmax_vectors = 10;
    double softmax_k = 5.0;
    int fsm_rounds = 5;
    int fsm_max_states = 200;
};

struct ExperimentConfig {
    int n_beliefs = 2000;
    int horizon = 60;
    std::uint64_t seed = 1;
    std::vector<std::string> methods{"mdp", "qmdp", "fib", "sawtooth-grid", "incremental-pointdp", "linq"};
    /// Controller modes to simulate; a method skips the ones it cannot provide.
    std::vector<std::string> modes{"la", "dr", "fsm"};
    /// Extra `# ` lines for the CSV header.
    std::vector<std::string> header;
    MethodSettings settings;
};

/// What a method hands to the simulator.
struct SolvedMethod {
    ValueFn value;
    std::int64_t value_cost = 0;       ///< dot products per evaluation of `value`
    std::optional<PwlcFn> tagged;      ///< enables the direct mode
    std::optional<FsmController> fsm;  ///< enables all three controller modes of a machine
};

using MethodSolver = std::function<SolvedMethod(const Pomdp&, const MethodSettings&, Rng&)>;

/// Names accepted in ExperimentConfig::methods.
std::vector<std::string> known_methods();
MethodSolver method_solver(const std::string& name);

struct ComparisonRow {
    std::string method;
    std::string mode;
    double bound_mean = 0.0;
    double control_mean = 0.0;
    double control_se = 0.0;
    double solve_ms = 0.0;
    double decision_ops = 0.0;
};

struct ComparisonReport {
    std::vector<std::string> header;
    std::vector<ComparisonRow> rows;
    std::vector<std::pair<std::string, std::string>> failures;  ///< method, message

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

/// `# ` header lines describing a maze: discount and reward constants.
std::vector<std::string> maze_header(const MazeSpec& spec);

/**
 * Solves each method, scores its value function on one shared set of
 * uniformly sampled beliefs, and simulates every supported controller mode
 * with one episode per belief of that set under common random numbers.
 * A method that throws is recorded in `failures` and the run continues.
 */
ComparisonReport run_comparison(const Pomdp& m, const ExperimentConfig& cfg);

}  // namespace pomdp
