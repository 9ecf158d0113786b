#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <set>

#include "gridxp/evaluation.hpp"
#include "gridxp/training.hpp"

using namespace gridxp;

TEST_CASE("discounted returns") {
  Trajectory traj;
  traj.instance = {{2, 1}, {1, 1}};
  traj.steps = {{{2, 1}, Action::kDown, 0.0, {3, 1}, false},
                {{3, 1}, Action::kUp, 0.0, {2, 1}, false},
                {{2, 1}, Action::kUp, 1.0, {1, 1}, true}};
  CHECK(compute_returns(traj, 0.95) == std::vector<double>{0.9025, 0.95, 1.0});
  CHECK(compute_returns(traj, 0.0) == std::vector<double>{0.0, 0.0, 1.0});
  traj.steps[2].reward = 0.0;
  CHECK(compute_returns(traj, 0.95) == std::vector<double>{0.0, 0.0, 0.0});
  traj.steps.clear();
  CHECK_THROWS_AS(compute_returns(traj, 0.95), std::invalid_argument);
}

TEST_CASE("replay store is FIFO with fixed capacity") {
  ReplayStore store(5);
  for (int i = 0; i < 8; ++i) {
    Trajectory t;
    t.instance = {{1, 1}, {2, 2}};
    t.steps.resize(static_cast<std::size_t>(i) + 1);
    store.push(std::move(t));
  }
  CHECK(store.size() == 5);
  // oldest three evicted: remaining lengths 4..8
  CHECK(store.game(0).steps.size() == 4);
  CHECK(store.game(4).steps.size() == 8);
  CHECK(store.total_moves() == 4 + 5 + 6 + 7 + 8);
}

TEST_CASE("generated games obey the environment and the seed") {
  TrainConfig config;
  config.method = Method::kReinforce;
  const GameInstance inst{{4, 4}, {1, 1}};
  Rng a(123), b(123);
  Rng model_rng(9);
  PolicyModel model(config.head, config.representation, model_rng);
  const Trajectory ta = generate_game(inst, model, config, a);
  const Trajectory tb = generate_game(inst, model, config, b);
  CHECK(ta.steps.size() == tb.steps.size());
  CHECK(ta.steps.size() <= 100);
  for (std::size_t i = 0; i < ta.steps.size(); ++i) {
    CHECK(ta.steps[i].agent == tb.steps[i].agent);
    CHECK(ta.steps[i].action == tb.steps[i].action);
  }
  CHECK(ta.completed == (ta.steps.back().reward == 1.0));
  // replaying the actions through step() reproduces the stored positions
  EpisodeState state = initial_state(inst);
  for (const TrajectoryStep& mv : ta.steps) {
    CHECK(state.agent == mv.agent);
    const StepResult r = step(inst, state, mv.action);
    CHECK(r.state.agent == mv.next_agent);
    CHECK(r.reward == mv.reward);
    state = r.state;
  }
}

TEST_CASE("a near-deterministic optimal policy generates minimum-length games") {
  // Drive the policy by hand: pick an optimal move with probability ~1 by
  // sampling; statistically all 100 trials are mistake-free.
  TrainConfig config;
  const GameInstance inst{{4, 4}, {1, 1}};
  const int min_moves = bfs_min_moves(inst);
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    EpisodeState state = initial_state(inst);
    while (!state.done) {
      const auto best = optimal_actions(state.agent, inst.goal);
      std::array<double, 4> probs{1e-9, 1e-9, 1e-9, 1e-9};
      probs[index_of(best[0])] = 1.0 - 3e-9;
      state = step(inst, state, action_from_index(rng.sample_categorical(probs))).state;
    }
    CHECK(state.steps_taken == min_moves);
  }
}

TEST_CASE("replay refresh keeps capacity and retires warm-up games after 8 rounds") {
  TrainConfig config;
  Rng rng(77);
  const GameInstance warmup_inst{{1, 1}, {5, 5}};
  const GameInstance fresh_inst{{2, 2}, {3, 3}};
  PolicyModel model(config.head, config.representation, rng);
  ReplayStore store;
  while (!store.at_capacity()) {
    store.push(generate_game(warmup_inst, model, config, rng));
  }
  CHECK(store.size() == 228);
  const std::vector<GameInstance> train{fresh_inst};
  int next = 0;
  auto warmup_games = [&] {
    int count = 0;
    for (int i = 0; i < store.size(); ++i) {
      if (store.game(i).instance == warmup_inst) ++count;
    }
    return count;
  };
  for (int refresh = 0; refresh < 7; ++refresh) {
    refresh_replay(store, train, model, config, rng, next);
    CHECK(store.size() == 228);
  }
  CHECK(warmup_games() == 228 - 7 * kGamesPerRefresh);  // eviction order = insertion order
  refresh_replay(store, train, model, config, rng, next);
  CHECK(warmup_games() == 0);  // ceil(228/32) = 8 refreshes clear the warm-up
}

TEST_CASE("q targets bootstrap from the maximum next value") {
  Rng rng(3);
  PolicyModel model(HeadKind::kLinear, Representation::kAbsolute, rng);

  TrajectoryStep terminal{{2, 1}, Action::kUp, 1.0, {1, 1}, true};
  CHECK(q_target(terminal, GameInstance{{2, 1}, {1, 1}}, model, 0.95) == 1.0);

  TrajectoryStep mid{{4, 4}, Action::kUp, 0.0, {3, 4}, false};
  const GameInstance inst{{4, 4}, {1, 1}};
  const auto next_vals = model.forward(model.encode(inst, Position{3, 4})).values;
  const double max_q = *std::max_element(next_vals.begin(), next_vals.end());
  CHECK(q_target(mid, inst, model, 0.95) == doctest::Approx(0.95 * max_q));
  CHECK(q_target(mid, inst, model, 0.0) == 0.0);
}

TEST_CASE("reinforce loss at a uniform policy") {
  Rng rng(4);
  PolicyModel model(HeadKind::kLinear, Representation::kAbsolute, rng);
  for (std::size_t i = kNumObjects * kEmbeddingDim; i < model.param_count(); ++i) {
    model.params()[i] = 0.0;
  }
  const GameInstance inst{{4, 4}, {1, 1}};
  const ObjectGrid grid = model.encode(inst, inst.start);
  std::vector<double> grad(model.param_count(), 0.0);
  // return 0, f = 0: no loss, no gradient
  CHECK(reinforce_step_loss(grid, Action::kUp, 0.0, model, 0.0, grad) == 0.0);
  for (double g : grad) CHECK(g == 0.0);
  // uniform policy, return 1: loss = log 4
  CHECK(reinforce_step_loss(grid, Action::kUp, 1.0, model, 0.0, grad) ==
        doctest::Approx(std::log(4.0)));
}

TEST_CASE("entropy term gradient matches finite differences away from ties") {
  Rng rng(5);
  PolicyModel model(HeadKind::kMirror, Representation::kEgocentric, rng);
  for (double& p : model.params()) p = rng.uniform_real(-0.5, 0.5);
  const GameInstance inst{{4, 4}, {1, 2}};
  const ObjectGrid grid = model.encode(inst, inst.start);
  const double f = 0.25, ret = 0.7, step_size = 1e-5;
  std::vector<double> analytic(model.param_count(), 0.0);
  const double loss = reinforce_step_loss(grid, Action::kUp, ret, model, f, analytic);
  CHECK(std::isfinite(loss));
  std::vector<double> scratch(model.param_count(), 0.0);
  for (std::size_t i = 0; i < model.param_count(); i += 3) {
    const double saved = model.params()[i];
    model.params()[i] = saved + step_size;
    const double up = reinforce_step_loss(grid, Action::kUp, ret, model, f, scratch);
    model.params()[i] = saved - step_size;
    const double down = reinforce_step_loss(grid, Action::kUp, ret, model, f, scratch);
    model.params()[i] = saved;
    const double fd = (up - down) / (2 * step_size);
    const double rel =
        std::abs(analytic[i] - fd) / std::max({std::abs(analytic[i]), std::abs(fd), 1e-6});
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("adam leaves parameters alone under zero gradients") {
  std::vector<double> params{1.0, -2.0, 3.0};
  const std::vector<double> zero(3, 0.0);
  AdamOptimizer opt(3, 0.002);
  for (int i = 0; i < 5; ++i) opt.step(params, zero);
  CHECK(params == std::vector<double>{1.0, -2.0, 3.0});
}

TEST_CASE("adam moves against the gradient") {
  std::vector<double> params{0.0};
  const std::vector<double> grad{1.0};
  AdamOptimizer opt(1, 0.002);
  opt.step(params, grad);
  CHECK(params[0] == doctest::Approx(-0.002).epsilon(1e-6));
}

TEST_CASE("entropy coefficient decays multiplicatively") {
  TrainConfig config;
  config.entropy_enabled = true;
  CHECK(config.f0 * std::pow(config.f_decay, 0) == 0.25);
  CHECK(config.f0 * std::pow(config.f_decay, 1) == doctest::Approx(0.2475));
  double prev = 1.0;
  for (int e = 0; e < 200; ++e) {
    const double f = config.f0 * std::pow(config.f_decay, e);
    CHECK(f > 0.0);
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("epoch sampling arithmetic: 3x NumMoves in batches of 10") {
  // 600 moves -> 1800 samples -> 180 full batches; verified through the
  // deterministic rng draw count.
  TrainConfig config;
  config.method = Method::kReinforce;
  config.head = HeadKind::kMirror;
  Rng rng(31);
  const InstanceSet set = generate_instance_set(1, 10, rng);
  PolicyModel model(config.head, config.representation, rng);
  AdamOptimizer opt(model.param_count(), config.learning_rate);
  ReplayStore store(4);
  while (!store.at_capacity()) store.push(generate_game(set.train[0], model, config, rng));
  const std::size_t moves = store.total_moves();
  Rng t1(99), t2(99);
  train_epoch(store, model, opt, config, 0, t1);
  // consume the same number of draws by hand: 3*moves index draws
  for (std::size_t i = 0; i < 3 * moves; ++i) {
    t2.uniform_int(0, static_cast<int>(moves) - 1);
  }
  CHECK(t1.next_u64() == t2.next_u64());
}

TEST_CASE("select_action_test: argmax with lowest-index ties, softmax sampling") {
  Rng rng(6);
  PolicyModel model(HeadKind::kLinear, Representation::kAbsolute, rng);
  // force Q-values (0.1, 0.9, 0.3, 0.9) via direct head surgery is awkward;
  // instead check the tie rule through a crafted model-free path: zero model
  // gives all-equal values -> action 0.
  for (std::size_t i = kNumObjects * kEmbeddingDim; i < model.param_count(); ++i) {
    model.params()[i] = 0.0;
  }
  const GameInstance inst{{4, 4}, {1, 1}};
  const ObjectGrid grid = model.encode(inst, inst.start);
  CHECK(select_action_test(model, grid, Method::kQLearning, rng) == Action::kLeft);

  // uniform policy sampling: empirical frequencies ~0.25
  std::array<int, 4> counts{};
  for (int i = 0; i < 10000; ++i) {
    ++counts[index_of(select_action_test(model, grid, Method::kReinforce, rng))];
  }
  for (int a = 0; a < 4; ++a) {
    CHECK(std::abs(counts[a] / 10000.0 - 0.25) < 0.02);
  }
}

TEST_CASE("short training runs are reproducible and improve the policy") {
  TrainConfig config;
  config.method = Method::kReinforce;
  config.representation = Representation::kEgocentric;
  config.head = HeadKind::kMirror;
  config.epochs = 30;
  config.seed = 7;
  Rng rng(2024);
  const InstanceSet set = generate_instance_set(1, 10, rng);

  const TrainResult a = run_training(set, config);
  const TrainResult b = run_training(set, config);
  REQUIRE(a.model.param_count() == b.model.param_count());
  for (std::size_t i = 0; i < a.model.param_count(); ++i) {
    CHECK(a.model.params()[i] == b.model.params()[i]);
  }
  REQUIRE(static_cast<int>(a.history.size()) == config.epochs);
  // the single train instance should be mastered quickly
  CHECK(a.history.back().train_completion == 1.0);
}
