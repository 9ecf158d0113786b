#include <doctest.h>

#include <set>
#include <stdexcept>

#include "gridxp/gridworld.hpp"

using namespace gridxp;

TEST_CASE("step moves into empty interior cells") {
  const GameInstance inst{{4, 4}, {1, 1}};
  const EpisodeState state{{4, 4}, 0, false};
  const StepResult r = step(inst, state, Action::kUp);
  CHECK(r.state.agent == Position{3, 4});
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.terminal);
  CHECK(r.state.steps_taken == 1);
}

TEST_CASE("moving into a wall leaves the agent in place") {
  const GameInstance inst{{2, 1}, {4, 4}};
  const EpisodeState state{{2, 1}, 0, false};
  const StepResult r = step(inst, state, Action::kLeft);
  CHECK(r.state.agent == Position{2, 1});
  CHECK(r.reward == 0.0);
  CHECK(r.state.steps_taken == 1);
}

TEST_CASE("reaching the goal pays +1 and terminates") {
  const GameInstance inst{{2, 1}, {1, 1}};
  const EpisodeState state{{2, 1}, 0, false};
  const StepResult r = step(inst, state, Action::kUp);
  CHECK(r.state.agent == Position{1, 1});
  CHECK(r.reward == 1.0);
  CHECK(r.terminal);
  CHECK(r.state.done);
}

TEST_CASE("episodes cap at 100 moves") {
  const GameInstance inst{{4, 4}, {1, 1}};
  EpisodeState state{{4, 4}, 99, false};
  const StepResult r = step(inst, state, Action::kDown);
  CHECK(r.terminal);
  CHECK(r.reward == 0.0);
  CHECK(r.state.steps_taken == 100);
}

TEST_CASE("stepping a done episode is rejected") {
  const GameInstance inst{{4, 4}, {1, 1}};
  const EpisodeState state{{4, 4}, 10, true};
  CHECK_THROWS_AS(step(inst, state, Action::kUp), std::logic_error);
}

TEST_CASE("random rollouts never escape the interior") {
  const GameInstance inst{{3, 3}, {1, 5}};
  Rng rng(17);
  EpisodeState state = initial_state(inst);
  for (int i = 0; i < 10000; ++i) {
    if (state.done) state = initial_state(inst);
    state = step(inst, state, action_from_index(rng.uniform_int(0, 3))).state;
    CHECK(is_interior(state.agent));
    CHECK(state.steps_taken <= kMaxMoves);
  }
}

TEST_CASE("instance sets satisfy their invariants") {
  for (int n_train : {1, 2, 4, 8, 16}) {
    Rng rng(1000 + n_train);
    const InstanceSet set = generate_instance_set(n_train, 10, rng);
    REQUIRE(static_cast<int>(set.train.size()) == n_train);
    REQUIRE(set.test.size() == 10);

    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> train_pairs, test_pairs;
    std::set<std::pair<int, int>> train_goals;
    for (const GameInstance& g : set.train) {
      CHECK(is_interior(g.start));
      CHECK(is_interior(g.goal));
      CHECK_FALSE(g.start == g.goal);
      train_pairs.insert({{g.start.row, g.start.col}, {g.goal.row, g.goal.col}});
      train_goals.insert({g.goal.row, g.goal.col});
    }
    CHECK(train_pairs.size() == set.train.size());
    for (const GameInstance& g : set.test) {
      CHECK_FALSE(g.start == g.goal);
      test_pairs.insert({{g.start.row, g.start.col}, {g.goal.row, g.goal.col}});
      CHECK(train_goals.count({g.goal.row, g.goal.col}) == 0);
    }
    CHECK(test_pairs.size() == set.test.size());
  }
}

TEST_CASE("instance generation is seed-deterministic") {
  Rng a(42), b(42);
  const InstanceSet sa = generate_instance_set(8, 10, a);
  const InstanceSet sb = generate_instance_set(8, 10, b);
  CHECK(sa.train == sb.train);
  CHECK(sa.test == sb.test);
}

TEST_CASE("infeasible instance constraints are rejected") {
  Rng rng(1);
  CHECK_THROWS_AS(generate_instance_set(0, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(generate_instance_set(601, 10, rng), std::invalid_argument);
}

TEST_CASE("rendered board matches the reference layout") {
  const GameInstance inst{{4, 4}, {1, 1}};
  const ObjectGrid grid = render_object_grid(inst, Position{4, 4});
  CHECK(grid.at(1, 1) == kGoal);
  CHECK(grid.at(4, 4) == kAgent);
  int walls = 0;
  for (int r = 0; r < kGridSide; ++r) {
    for (int c = 0; c < kGridSide; ++c) {
      if (grid.at(r, c) == kWall) ++walls;
    }
  }
  CHECK(walls == 24);

  const ObjectGrid corner = render_object_grid(GameInstance{{1, 1}, {5, 5}}, Position{1, 1});
  CHECK(corner.at(1, 1) == kAgent);
  CHECK(corner.at(5, 5) == kGoal);
}

TEST_CASE("ascii renderer uses the documented glyphs") {
  const GameInstance inst{{4, 4}, {1, 1}};
  const std::string art = ascii_render(inst, Position{4, 4});
  CHECK(art.substr(0, 8) == "XXXXXXX\n");
  CHECK(art.find('@') != std::string::npos);
  CHECK(art.find('*') != std::string::npos);
  // agent row: border, then three spaces, the agent, a space, border
  CHECK(art.find("X...@.X") != std::string::npos);
}
