#include "gridxp/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace gridxp {

std::vector<double> compute_returns(const Trajectory& traj, double gamma) {
  if (traj.steps.empty()) {
    throw std::invalid_argument("compute_returns: empty trajectory");
  }
  std::vector<double> returns(traj.steps.size());
  double acc = 0.0;
  for (std::size_t i = traj.steps.size(); i-- > 0;) {
    acc = traj.steps[i].reward + gamma * acc;
    returns[i] = acc;
  }
  return returns;
}

void ReplayStore::push(Trajectory traj) {
  if (size() == capacity_) games_.pop_front();
  games_.push_back(std::move(traj));
}

std::size_t ReplayStore::total_moves() const {
  std::size_t n = 0;
  for (const Trajectory& t : games_) n += t.steps.size();
  return n;
}

namespace {

int argmax_lowest(const std::array<double, 4>& values) {
  int best = 0;
  for (int i = 1; i < 4; ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace

Trajectory generate_game(const GameInstance& instance, const PolicyModel& model,
                         const TrainConfig& config, Rng& rng) {
  Trajectory traj;
  traj.instance = instance;
  EpisodeState state = initial_state(instance);
  while (!state.done) {
    const ObjectGrid grid = model.encode(instance, state.agent);
    const ModelOutput out = model.forward(grid);
    Action action;
    if (config.method == Method::kReinforce) {
      action = action_from_index(rng.sample_categorical(out.probs));
    } else {
      if (rng.uniform_real() < config.epsilon_explore) {
        action = action_from_index(rng.uniform_int(0, 3));
      } else {
        action = action_from_index(argmax_lowest(out.values));
      }
    }
    const StepResult result = step(instance, state, action);
    traj.steps.push_back(TrajectoryStep{state.agent, action, result.reward,
                                        result.state.agent, result.terminal});
    state = result.state;
  }
  traj.completed = traj.steps.back().reward == 1.0;
  traj.returns = compute_returns(traj, config.gamma);
  return traj;
}

void refresh_replay(ReplayStore& store, std::span<const GameInstance> train,
                    const PolicyModel& model, const TrainConfig& config, Rng& rng,
                    int& next_instance) {
  for (int i = 0; i < kGamesPerRefresh; ++i) {
    const GameInstance& instance = train[next_instance % train.size()];
    next_instance = (next_instance + 1) % static_cast<int>(train.size());
    store.push(generate_game(instance, model, config, rng));
  }
}

double q_target(const TrajectoryStep& transition, const GameInstance& instance,
                const PolicyModel& model, double gamma) {
  if (transition.terminal) return transition.reward;
  const ObjectGrid next_grid = model.encode(instance, transition.next_agent);
  const ModelOutput next = model.forward(next_grid);
  const double max_q = *std::max_element(next.values.begin(), next.values.end());
  return transition.reward + gamma * max_q;
}

double reinforce_step_loss(const ObjectGrid& grid, Action action, double return_value,
                           const PolicyModel& model, double f, std::span<double> grad) {
  const ModelOutput out = model.forward(grid);
  const int a = index_of(action);
  const int m = argmax_lowest(out.probs);
  const double loss = -std::log(out.probs[a]) * return_value + f * out.probs[m];
  if (!std::isfinite(loss)) {
    throw NumericalError("non-finite REINFORCE loss", -1);
  }
  std::array<double, 4> dvalues{};
  for (int j = 0; j < 4; ++j) {
    dvalues[j] = return_value * (out.probs[j] - (j == a ? 1.0 : 0.0));
    dvalues[j] += f * out.probs[m] * ((j == m ? 1.0 : 0.0) - out.probs[j]);
  }
  model.backward(grid, dvalues, grad);
  return loss;
}

AdamOptimizer::AdamOptimizer(std::size_t n_params, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon),
      m_(n_params, 0.0), v_(n_params, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("AdamOptimizer: size mismatch");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    const double g = grad[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    params[i] -= lr_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps_);
  }
}

namespace {

struct SampleRef {
  int game;
  int move;
};

}  // namespace

void train_epoch(const ReplayStore& store, PolicyModel& model, AdamOptimizer& opt,
                 const TrainConfig& config, int epoch_index, Rng& rng) {
  std::vector<SampleRef> moves;
  moves.reserve(store.total_moves());
  for (int g = 0; g < store.size(); ++g) {
    const int len = static_cast<int>(store.game(g).steps.size());
    for (int t = 0; t < len; ++t) moves.push_back(SampleRef{g, t});
  }
  if (moves.empty()) throw std::logic_error("train_epoch: empty replay store");

  const double f = config.entropy_enabled
                       ? config.f0 * std::pow(config.f_decay, static_cast<double>(epoch_index))
                       : 0.0;
  const std::size_t n_samples = 3 * moves.size();
  std::vector<double> grad(model.param_count());

  std::size_t done = 0;
  while (done < n_samples) {
    const int batch = static_cast<int>(
        std::min<std::size_t>(config.batch_size, n_samples - done));
    std::fill(grad.begin(), grad.end(), 0.0);
    for (int b = 0; b < batch; ++b) {
      const SampleRef ref = moves[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(moves.size()) - 1))];
      const Trajectory& traj = store.game(ref.game);
      const TrajectoryStep& mv = traj.steps[ref.move];
      const ObjectGrid grid = model.encode(traj.instance, mv.agent);
      if (config.method == Method::kReinforce) {
        try {
          reinforce_step_loss(grid, mv.action, traj.returns[ref.move], model, f, grad);
        } catch (NumericalError&) {
          throw NumericalError("non-finite REINFORCE loss", epoch_index);
        }
      } else {
        const double target = q_target(mv, traj.instance, model, config.gamma);
        const ModelOutput out = model.forward(grid);
        const double err = out.values[index_of(mv.action)] - target;
        if (!std::isfinite(err)) {
          throw NumericalError("non-finite Q-learning error", epoch_index);
        }
        std::array<double, 4> dvalues{};
        dvalues[index_of(mv.action)] = 2.0 * err;
        model.backward(grid, dvalues, grad);
      }
    }
    const double inv = 1.0 / batch;
    for (double& g : grad) {
      g = std::clamp(g * inv, -config.grad_clip, config.grad_clip);
    }
    opt.step(model.params(), grad);
    done += batch;
  }
}

Action select_action_test(const PolicyModel& model, const ObjectGrid& grid, Method method,
                          Rng& rng) {
  const ModelOutput out = model.forward(grid);
  if (method == Method::kQLearning) {
    return action_from_index(argmax_lowest(out.values));
  }
  return action_from_index(rng.sample_categorical(out.probs));
}

namespace {

// Train-side completion / over-minimum snapshot for the per-epoch stream.
// The board has no interior walls, so the minimum move count is the
// Manhattan distance (the BFS oracle in the evaluation module agrees).
EpochRecord snapshot_train_metrics(const PolicyModel& model, std::span<const GameInstance> train,
                                   const TrainConfig& config, int epoch_index, double f,
                                   Rng& eval_rng) {
  EpochRecord rec;
  rec.epoch = epoch_index;
  rec.entropy_coeff = f;
  int completed = 0;
  double extra = 0.0;
  for (const GameInstance& instance : train) {
    EpisodeState state = initial_state(instance);
    while (!state.done) {
      const ObjectGrid grid = model.encode(instance, state.agent);
      const Action a = select_action_test(model, grid, config.method, eval_rng);
      state = step(instance, state, a).state;
    }
    if (state.agent == instance.goal) {
      ++completed;
      const int min_moves = std::abs(instance.start.row - instance.goal.row) +
                            std::abs(instance.start.col - instance.goal.col);
      extra += state.steps_taken - min_moves;
    }
  }
  rec.train_completion = static_cast<double>(completed) / static_cast<double>(train.size());
  rec.train_over_min = completed > 0 ? extra / completed : std::nan("");
  return rec;
}

}  // namespace

TrainResult run_training(const InstanceSet& instances, const TrainConfig& config,
                         std::ostream* log) {
  if (instances.train.empty()) {
    throw std::invalid_argument("run_training: no train instances");
  }
  Rng rng(config.seed);
  PolicyModel model(config.head, config.representation, rng);
  AdamOptimizer opt(model.param_count(), config.learning_rate);
  ReplayStore store;
  int next_instance = 0;

  // Warm-up under the freshly initialized (near-uniform) policy.
  while (!store.at_capacity()) {
    const GameInstance& instance = instances.train[next_instance % instances.train.size()];
    next_instance = (next_instance + 1) % static_cast<int>(instances.train.size());
    store.push(generate_game(instance, model, config, rng));
  }

  TrainResult result{std::move(model), {}};
  result.history.reserve(config.epochs);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    refresh_replay(store, instances.train, result.model, config, rng, next_instance);
    train_epoch(store, result.model, opt, config, epoch, rng);
    for (double p : result.model.params()) {
      if (!std::isfinite(p)) throw NumericalError("non-finite parameter", epoch);
    }
    const double f = config.entropy_enabled
                         ? config.f0 * std::pow(config.f_decay, static_cast<double>(epoch))
                         : 0.0;
    Rng eval_rng(rng.next_u64());
    result.history.push_back(
        snapshot_train_metrics(result.model, instances.train, config, epoch, f, eval_rng));
    if (log) {
      const EpochRecord& r = result.history.back();
      (*log) << r.epoch << ' ' << r.train_completion << ' ' << r.train_over_min << ' '
             << r.entropy_coeff << '\n';
    }
  }
  return result;
}

}  // namespace gridxp
