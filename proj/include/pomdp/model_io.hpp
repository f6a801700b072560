#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pomdp/maze.hpp"
#include "pomdp/model.hpp"

namespace pomdp {

/// Model document:
/// {discount, states, actions, observations,
///  transition[a][s][s'], observation[a][s'][o], reward[a][s][s']}.
/// `states`/`actions`/`observations` are either counts or name lists.
nlohmann::json model_to_json(const Pomdp& m);
Pomdp model_from_json(const nlohmann::json& doc);

/// Throws ParseError for unreadable/malformed files, ValidationError for bad tables.
Pomdp load_model(const std::filesystem::path& path);
void save_model(const Pomdp& m, const std::filesystem::path& path);

/// {layout: {rows, cols, walls, target}, noise, sensors: {two_wall, one_wall, no_wall},
///  rewards: {move, sense, target}, discount}. Missing keys keep defaults.
nlohmann::json maze_spec_to_json(const MazeSpec& spec);
MazeSpec maze_spec_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace pomdp
