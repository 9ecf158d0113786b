#include "gridxp/gridworld.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridxp {

StepResult step(const GameInstance& instance, const EpisodeState& state, Action action) {
  if (state.done) {
    throw std::logic_error("step() called on a finished episode");
  }
  const Delta d = delta_of(action);
  Position next{state.agent.row + d.drow, state.agent.col + d.dcol};
  if (!is_interior(next)) {
    next = state.agent;  // bounced off the wall
  }
  StepResult out;
  out.state.agent = next;
  out.state.steps_taken = state.steps_taken + 1;
  out.reward = (next == instance.goal) ? 1.0 : 0.0;
  out.terminal = (next == instance.goal) || (out.state.steps_taken >= kMaxMoves);
  out.state.done = out.terminal;
  return out;
}

namespace {

Position random_interior(Rng& rng) {
  return Position{rng.uniform_int(1, kGridSide - 2), rng.uniform_int(1, kGridSide - 2)};
}

bool contains(const std::vector<GameInstance>& v, const GameInstance& g) {
  return std::find(v.begin(), v.end(), g) != v.end();
}

}  // namespace

InstanceSet generate_instance_set(int n_train, int n_test, Rng& rng) {
  constexpr int kInterior = (kGridSide - 2) * (kGridSide - 2);
  constexpr int kDistinctPairs = kInterior * (kInterior - 1);
  if (n_train < 1 || n_train > kDistinctPairs) {
    throw std::invalid_argument("generate_instance_set: infeasible n_train");
  }
  if (n_test < 0 || n_test > kDistinctPairs) {
    throw std::invalid_argument("generate_instance_set: infeasible n_test");
  }
  // Train goals can occupy at most min(n_train, kInterior) distinct cells;
  // at least one interior cell must remain for test goals.
  if (n_test > 0 && n_train >= kInterior) {
    throw std::invalid_argument("generate_instance_set: no goal cells left for test");
  }

  InstanceSet set;
  set.train.reserve(n_train);
  while (static_cast<int>(set.train.size()) < n_train) {
    GameInstance g{random_interior(rng), random_interior(rng)};
    if (g.start == g.goal || contains(set.train, g)) continue;
    set.train.push_back(g);
  }

  set.test.reserve(n_test);
  while (static_cast<int>(set.test.size()) < n_test) {
    GameInstance g{random_interior(rng), random_interior(rng)};
    if (g.start == g.goal || contains(set.test, g)) continue;
    bool goal_seen_in_train = false;
    for (const GameInstance& t : set.train) {
      if (t.goal == g.goal) {
        goal_seen_in_train = true;
        break;
      }
    }
    if (goal_seen_in_train) continue;
    set.test.push_back(g);
  }
  return set;
}

ObjectGrid render_object_grid(const GameInstance& instance, Position agent) {
  if (!is_interior(agent)) {
    throw std::invalid_argument("render_object_grid: agent must be interior");
  }
  ObjectGrid grid(kGridSide, kSpace);
  for (int r = 0; r < kGridSide; ++r) {
    for (int c = 0; c < kGridSide; ++c) {
      if (is_wall(Position{r, c})) grid.at(r, c) = kWall;
    }
  }
  grid.at(instance.goal.row, instance.goal.col) = kGoal;
  grid.at(agent.row, agent.col) = kAgent;
  return grid;
}

std::string ascii_render(const GameInstance& instance, Position agent) {
  static constexpr char kGlyphs[] = {'.', 'X', '@', '*', '?'};
  const ObjectGrid grid = render_object_grid(instance, agent);
  std::string out;
  out.reserve(static_cast<std::size_t>(kGridSide) * (kGridSide + 1));
  for (int r = 0; r < kGridSide; ++r) {
    for (int c = 0; c < kGridSide; ++c) out.push_back(kGlyphs[grid.at(r, c)]);
    out.push_back('\n');
  }
  return out;
}

}  // namespace gridxp
