#include "pomdp/model_io.hpp"

#include <fstream>

#include "pomdp/errors.hpp"

namespace pomdp {

using nlohmann::json;

namespace {

using Table3 = std::vector<std::vector<std::vector<double>>>;

std::vector<std::string> names_or_empty(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_array()) return {};
    return doc[key].get<std::vector<std::string>>();
}

}  // namespace

json model_to_json(const Pomdp& m) {
    const int ns = m.num_states(), na = m.num_actions(), no = m.num_obs();
    Table3 trans(na, std::vector<std::vector<double>>(ns, std::vector<double>(ns)));
    Table3 obs(na, std::vector<std::vector<double>>(ns, std::vector<double>(no)));
    Table3 reward(na, std::vector<std::vector<double>>(ns, std::vector<double>(ns)));
    for (int a = 0; a < na; ++a) {
        for (int s = 0; s < ns; ++s) {
            for (int sp = 0; sp < ns; ++sp) {
                trans[a][s][sp] = m.trans(s, a, sp);
                reward[a][s][sp] = m.reward(s, a, sp);
            }
            for (int o = 0; o < no; ++o) obs[a][s][o] = m.obs(a, s, o);
        }
    }
    json doc;
    doc["discount"] = m.discount();
    doc["states"] = m.state_names.empty() ? json(ns) : json(m.state_names);
    doc["actions"] = m.action_names.empty() ? json(na) : json(m.action_names);
    doc["observations"] = m.obs_names.empty() ? json(no) : json(m.obs_names);
    doc["transition"] = trans;
    doc["observation"] = obs;
    doc["reward"] = reward;
    return doc;
}

Pomdp model_from_json(const json& doc) {
    Table3 trans, obs, reward;
    double discount = 0.0;
    try {
        discount = doc.at("discount").get<double>();
        trans = doc.at("transition").get<Table3>();
        obs = doc.at("observation").get<Table3>();
        reward = doc.at("reward").get<Table3>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model document: ") + e.what());
    }
    Pomdp m(std::move(trans), std::move(obs), std::move(reward), discount);
    m.state_names = names_or_empty(doc, "states");
    m.action_names = names_or_empty(doc, "actions");
    m.obs_names = names_or_empty(doc, "observations");
    return m;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

Pomdp load_model(const std::filesystem::path& path) { return model_from_json(read_json_file(path)); }

void save_model(const Pomdp& m, const std::filesystem::path& path) {
    write_json_file(model_to_json(m), path);
}

json maze_spec_to_json(const MazeSpec& spec) {
    json walls = json::array();
    for (auto [a, b] : spec.walls) walls.push_back({a, b});
    return {
        {"layout", {{"rows", spec.rows}, {"cols", spec.cols}, {"walls", walls}, {"target", spec.target}}},
        {"noise", spec.move_noise},
        {"sensors",
         {{"two_wall", spec.sensor_two_wall},
          {"one_wall", spec.sensor_one_wall},
          {"no_wall", spec.sensor_no_wall}}},
        {"rewards",
         {{"move", spec.reward_move}, {"sense", spec.reward_sense}, {"target", spec.reward_target}}},
        {"discount", spec.discount},
    };
}

MazeSpec maze_spec_from_json(const json& doc) {
    MazeSpec spec = default_maze20();
    try {
        if (doc.contains("layout")) {
            const json& l = doc["layout"];
            spec.rows = l.value("rows", spec.rows);
            spec.cols = l.value("cols", spec.cols);
            spec.target = l.value("target", spec.target);
            if (l.contains("walls")) {
                spec.walls.clear();
                for (const auto& w : l["walls"]) spec.walls.emplace_back(w.at(0).get<int>(), w.at(1).get<int>());
            }
        }
        spec.move_noise = doc.value("noise", spec.move_noise);
        if (doc.contains("sensors")) {
            const json& s = doc["sensors"];
            spec.sensor_two_wall = s.value("two_wall", spec.sensor_two_wall);
            spec.sensor_one_wall = s.value("one_wall", spec.sensor_one_wall);
            spec.sensor_no_wall = s.value("no_wall", spec.sensor_no_wall);
        }
        if (doc.contains("rewards")) {
            const json& r = doc["rewards"];
            spec.reward_move = r.value("move", spec.reward_move);
            spec.reward_sense = r.value("sense", spec.reward_sense);
            spec.reward_target = r.value("target", spec.reward_target);
        }
        spec.discount = doc.value("discount", spec.discount);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed maze spec: ") + e.what());
    }
    return spec;
}

}  // namespace pomdp
