#pragma once

#include <string>
#include <vector>

#include "gridxp/object_grid.hpp"
#include "gridxp/rng.hpp"

namespace gridxp {

inline constexpr int kGridSide = 7;   // board is 7x7 including the wall border
inline constexpr int kMaxMoves = 100; // episode cap
inline constexpr int kNumActions = 4;

// Fixed, global action meaning. The index order matters: quadrant masks and
// the rotational heads rely on index d mapping to this direction.
enum class Action : int { kLeft = 0, kDown = 1, kRight = 2, kUp = 3 };

inline int index_of(Action a) { return static_cast<int>(a); }
inline Action action_from_index(int i) { return static_cast<Action>(i); }

// (drow, dcol) displacement of one move.
struct Delta {
  int drow;
  int dcol;
};
inline Delta delta_of(Action a) {
  switch (a) {
    case Action::kLeft: return {0, -1};
    case Action::kDown: return {1, 0};
    case Action::kRight: return {0, 1};
    case Action::kUp: return {-1, 0};
  }
  return {0, 0};
}

struct Position {
  int row = 0;
  int col = 0;
  bool operator==(const Position&) const = default;
};

// Interior cells are the ones an agent or goal may occupy.
inline bool is_interior(Position p) {
  return p.row >= 1 && p.row <= kGridSide - 2 && p.col >= 1 && p.col <= kGridSide - 2;
}
inline bool is_wall(Position p) {
  return p.row == 0 || p.row == kGridSide - 1 || p.col == 0 || p.col == kGridSide - 1;
}

// One Gridworld game: a (start, goal) pair of distinct interior cells.
struct GameInstance {
  Position start;
  Position goal;
  bool operator==(const GameInstance&) const = default;
};

struct EpisodeState {
  Position agent;
  int steps_taken = 0;
  bool done = false;
};

inline EpisodeState initial_state(const GameInstance& instance) {
  return EpisodeState{instance.start, 0, false};
}

struct StepResult {
  EpisodeState state;
  double reward = 0.0;
  bool terminal = false;
};

// Deterministic transition. Moves into walls leave the agent in place.
// Reward is +1 exactly when the goal is reached. Stepping a done episode
// throws std::logic_error.
StepResult step(const GameInstance& instance, const EpisodeState& state, Action action);

struct InstanceSet {
  std::vector<GameInstance> train;
  std::vector<GameInstance> test;
};

// Samples n_train training and n_test testing instances uniformly, with no
// duplicate (start, goal) pairs inside either list, and with every test goal
// on a cell unused by any train goal (so all test states are unreachable
// from training). Throws std::invalid_argument when infeasible.
InstanceSet generate_instance_set(int n_train, int n_test, Rng& rng);

// Absolute 7x7 object grid: walls on the border, agent and goal inside.
ObjectGrid render_object_grid(const GameInstance& instance, Position agent);

// Debug rendering with the glyphs 'X' wall, '@' agent, '*' goal, '.' space.
std::string ascii_render(const GameInstance& instance, Position agent);

}  // namespace gridxp
