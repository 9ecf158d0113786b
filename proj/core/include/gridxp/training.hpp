#pragma once

#include <cstdint>
#include <deque>
#include <ostream>
#include <span>
#include <vector>

#include "gridxp/gridworld.hpp"
#include "gridxp/model.hpp"
#include "gridxp/rng.hpp"

namespace gridxp {

enum class Method { kQLearning, kReinforce };

inline constexpr int kReplayCapacity = 228;
inline constexpr int kGamesPerRefresh = 32;

struct TrainConfig {
  Method method = Method::kReinforce;
  Representation representation = Representation::kEgocentric;
  HeadKind head = HeadKind::kMirror;
  bool entropy_enabled = false;
  double gamma = 0.95;
  double learning_rate = 0.002;
  int batch_size = 10;
  int epochs = 200;
  double grad_clip = 20.0;
  double f0 = 0.25;
  double f_decay = 0.99;
  double epsilon_explore = 0.1;
  std::uint64_t seed = 0;
};

// Raised when a loss or parameter goes non-finite; carries the epoch.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what, int epoch_index)
      : std::runtime_error(what), epoch(epoch_index) {}
  int epoch = -1;
};

struct TrajectoryStep {
  Position agent;       // position at decision time
  Action action;
  double reward;
  Position next_agent;  // position after the move
  bool terminal;
};

// One complete game played under some policy.
struct Trajectory {
  GameInstance instance;
  std::vector<TrajectoryStep> steps;
  std::vector<double> returns;  // discounted returns per step, cached at creation
  bool completed = false;
};

// G_t = sum_{k>=t} gamma^(k-t) r_k.
std::vector<double> compute_returns(const Trajectory& traj, double gamma);

// FIFO store of complete games, refreshed 32-at-a-time each epoch.
class ReplayStore {
 public:
  explicit ReplayStore(int capacity = kReplayCapacity) : capacity_(capacity) {}

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(games_.size()); }
  bool at_capacity() const { return size() == capacity_; }
  const Trajectory& game(int i) const { return games_[i]; }

  void push(Trajectory traj);  // evicts the oldest when full
  std::size_t total_moves() const;

 private:
  int capacity_;
  std::deque<Trajectory> games_;
};

// Plays one game: softmax sampling for REINFORCE, epsilon-greedy over
// Q-values (ties to the lowest action index) for Q-learning.
Trajectory generate_game(const GameInstance& instance, const PolicyModel& model,
                         const TrainConfig& config, Rng& rng);

// Evicts the 32 oldest games and appends 32 fresh ones, cycling through the
// train instances round-robin via `next_instance`.
void refresh_replay(ReplayStore& store, std::span<const GameInstance> train,
                    const PolicyModel& model, const TrainConfig& config, Rng& rng,
                    int& next_instance);

// Bootstrapped target, treated as a constant in the squared loss:
// r when terminal, else r + gamma * max_a' Q(s', a').
double q_target(const TrajectoryStep& transition, const GameInstance& instance,
                const PolicyModel& model, double gamma);

// loss = -log pi(action) * return + f * max_a pi(a); accumulates d(loss)/d(params)
// into `grad`. Ties in the max break toward the lowest action index.
double reinforce_step_loss(const ObjectGrid& grid, Action action, double return_value,
                           const PolicyModel& model, double f, std::span<double> grad);

// Componentwise Adam with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t n_params, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<double> m_, v_;
};

// One epoch: 3 * NumMoves uniform samples from the store, processed in
// batches; per-batch mean gradients are clipped componentwise and applied.
void train_epoch(const ReplayStore& store, PolicyModel& model, AdamOptimizer& opt,
                 const TrainConfig& config, int epoch_index, Rng& rng);

// Greedy argmax for Q-learning (ties to the lowest index); a sample from the
// softmax policy for REINFORCE.
Action select_action_test(const PolicyModel& model, const ObjectGrid& grid, Method method,
                          Rng& rng);

struct EpochRecord {
  int epoch = 0;
  double train_completion = 0.0;
  double train_over_min = 0.0;  // NaN when no game completed
  double entropy_coeff = 0.0;
};

struct TrainResult {
  PolicyModel model;
  std::vector<EpochRecord> history;
};

// Warm-up fill to 228 games with the freshly initialized model, then
// config.epochs iterations of refresh + train. When `log` is given, one
// line per epoch: "epoch completion over_min f".
TrainResult run_training(const InstanceSet& instances, const TrainConfig& config,
                         std::ostream* log = nullptr);

}  // namespace gridxp
