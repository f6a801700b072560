#include "pomdp/maze.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string>

#include "pomdp/errors.hpp"

namespace pomdp {

namespace {

constexpr std::array<const char*, 6> kActionNames = {"north", "south", "east",
                                                     "west",  "sense-ns", "sense-ew"};

bool walled(const std::set<std::pair<int, int>>& walls, int a, int b) {
    return walls.count({std::min(a, b), std::max(a, b)}) > 0;
}

std::set<std::pair<int, int>> wall_set(const MazeSpec& spec) {
    std::set<std::pair<int, int>> out;
    for (auto [a, b] : spec.walls) out.insert({std::min(a, b), std::max(a, b)});
    return out;
}

int raw_neighbor(const MazeSpec& spec, int room, int dir) {
    const int r = room / spec.cols, c = room % spec.cols;
    switch (dir) {
        case kNorth: return r > 0 ? room - spec.cols : -1;
        case kSouth: return r + 1 < spec.rows ? room + spec.cols : -1;
        case kEast: return c + 1 < spec.cols ? room + 1 : -1;
        case kWest: return c > 0 ? room - 1 : -1;
        default: return -1;
    }
}

double sensor_accuracy(const MazeSpec& spec, int wall_count) {
    switch (wall_count) {
        case 2: return spec.sensor_two_wall;
        case 1: return spec.sensor_one_wall;
        default: return spec.sensor_no_wall;
    }
}

}  // namespace

MazeSpec default_maze20() {
    MazeSpec spec;
    //  0  1  2  3  4
    //  5  6  7  8  9
    // 10 11 12 13 14
    // 15 16 17 18 19
    spec.walls = {{1, 6},   {3, 8},   {5, 10},  {6, 7},   {8, 13},  {11, 12},
                  {12, 17}, {15, 16}, {18, 19}, {4, 9},   {7, 12},  {16, 17}};
    spec.target = 9;
    return spec;
}

int maze_neighbor(const MazeSpec& spec, int room, int dir) {
    const int nb = raw_neighbor(spec, room, dir);
    if (nb < 0) return room;
    for (auto [a, b] : spec.walls) {
        if ((a == room && b == nb) || (a == nb && b == room)) return room;
    }
    return nb;
}

Pomdp build_maze20(const MazeSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1) throw ValidationError("maze needs at least one room");
    const int n = spec.num_rooms();
    if (spec.target < 0 || spec.target >= n) throw ValidationError("maze target room does not exist");
    for (auto [a, b] : spec.walls) {
        if (a < 0 || a >= n || b < 0 || b >= n) {
            throw ValidationError("wall references room outside the grid");
        }
        bool adjacent = false;
        for (int d = 0; d < 4; ++d) adjacent = adjacent || raw_neighbor(spec, a, d) == b;
        if (!adjacent) {
            throw ValidationError("wall between non-adjacent rooms " + std::to_string(a) + " and " +
                                  std::to_string(b));
        }
    }
    if (spec.move_noise < 0.0 || spec.move_noise > 1.0) throw ValidationError("move noise out of [0,1]");

    const auto walls = wall_set(spec);
    auto has_wall = [&](int room, int dir) {
        const int nb = raw_neighbor(spec, room, dir);
        return nb < 0 || walled(walls, room, nb);
    };

    constexpr int kActions = 6, kObs = 8;
    using Table3 = std::vector<std::vector<std::vector<double>>>;
    Table3 trans(kActions, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
    Table3 obs(kActions, std::vector<std::vector<double>>(n, std::vector<double>(kObs, 0.0)));
    Table3 reward(kActions, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));

    // Lateral directions for N,S,E,W.
    constexpr std::array<std::array<int, 2>, 4> kLateral = {
        {{kEast, kWest}, {kEast, kWest}, {kNorth, kSouth}, {kNorth, kSouth}}};

    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < 4; ++a) {
            if (s == spec.target) {
                for (int sp = 0; sp < n; ++sp) {
                    trans[a][s][sp] = 1.0 / n;
                    reward[a][s][sp] = spec.reward_target;
                }
                continue;
            }
            trans[a][s][maze_neighbor(spec, s, a)] += 1.0 - spec.move_noise;
            for (int lat : kLateral[a]) trans[a][s][maze_neighbor(spec, s, lat)] += spec.move_noise / 2.0;
            for (int sp = 0; sp < n; ++sp) reward[a][s][sp] = sp != s ? spec.reward_move : 0.0;
        }
        for (int a = kSenseNS; a <= kSenseEW; ++a) {
            trans[a][s][s] = 1.0;
            reward[a][s][s] = spec.reward_sense;
        }
    }

    for (int sp = 0; sp < n; ++sp) {
        for (int a = 0; a < 4; ++a) obs[a][sp][0] = 1.0;
        for (int k = 0; k < 2; ++k) {
            const int a = kSenseNS + k;
            const int first = k == 0 ? kNorth : kEast;
            const int second = k == 0 ? kSouth : kWest;
            const bool w1 = has_wall(sp, first), w2 = has_wall(sp, second);
            const int truth = (w1 ? 2 : 0) + (w2 ? 1 : 0);
            const double acc = sensor_accuracy(spec, static_cast<int>(w1) + static_cast<int>(w2));
            for (int r = 0; r < 4; ++r) {
                obs[a][sp][4 * k + r] = r == truth ? acc : (1.0 - acc) / 3.0;
            }
        }
    }

    Pomdp m(std::move(trans), std::move(obs), std::move(reward), spec.discount);
    for (int s = 0; s < n; ++s) m.state_names.push_back("room" + std::to_string(s));
    m.action_names.assign(kActionNames.begin(), kActionNames.end());
    m.obs_names = {"ns:none", "ns:south", "ns:north", "ns:both",
                   "ew:none", "ew:west",  "ew:east",  "ew:both"};
    return m;
}

}  // namespace pomdp
