#pragma once

#include <utility>
#include <vector>

#include "pomdp/model.hpp"

namespace pomdp {

/// Room-grid navigation problem with noisy moves and wall sensors.
///
/// Rooms are numbered row-major; `walls` lists pairs of adjacent rooms that
/// are separated. The outer boundary is always walled. Actions are
/// N, S, E, W, sense-NS, sense-EW. Observations 0-3 are the north/south
/// readings (bit 1 = north wall, bit 0 = south wall) and 4-7 the east/west
/// readings; move actions emit observation 0 with certainty, which carries
/// no information about the landing room.
struct MazeSpec {
    int rows = 4;
    int cols = 5;
    std::vector<std::pair<int, int>> walls;
    int target = 9;

    double move_noise = 0.3;  ///< split evenly between the two lateral directions
    double sensor_two_wall = 0.75;
    double sensor_one_wall = 0.8;
    double sensor_no_wall = 0.89;

    double reward_move = 4.0;
    double reward_sense = 2.0;
    double reward_target = 150.0;
    double discount = 0.9;

    int num_rooms() const { return rows * cols; }
};

enum MazeAction : int { kNorth = 0, kSouth, kEast, kWest, kSenseNS, kSenseEW };

/// The documented default 4x5 layout with 20 rooms.
MazeSpec default_maze20();

/// Throws ValidationError on inconsistent geometry.
Pomdp build_maze20(const MazeSpec& spec);

/// Room reached by moving from `room` in direction `dir` (0..3), or `room` itself on a wall.
int maze_neighbor(const MazeSpec& spec, int room, int dir);

}  // namespace pomdp
