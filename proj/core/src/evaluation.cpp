#include "gridxp/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <stdexcept>

namespace gridxp {

namespace {

// BFS distances to `goal` over interior cells; -1 where unreachable.
std::array<int, kGridSide * kGridSide> bfs_distances(Position goal) {
  std::array<int, kGridSide * kGridSide> dist;
  dist.fill(-1);
  std::queue<Position> frontier;
  dist[goal.row * kGridSide + goal.col] = 0;
  frontier.push(goal);
  while (!frontier.empty()) {
    const Position p = frontier.front();
    frontier.pop();
    for (int a = 0; a < kNumActions; ++a) {
      const Delta d = delta_of(action_from_index(a));
      const Position q{p.row + d.drow, p.col + d.dcol};
      if (!is_interior(q)) continue;
      int& entry = dist[q.row * kGridSide + q.col];
      if (entry < 0) {
        entry = dist[p.row * kGridSide + p.col] + 1;
        frontier.push(q);
      }
    }
  }
  return dist;
}

}  // namespace

int bfs_min_moves(const GameInstance& instance) {
  const auto dist = bfs_distances(instance.goal);
  return dist[instance.start.row * kGridSide + instance.start.col];
}

std::vector<Action> optimal_actions(Position agent, Position goal) {
  if (agent == goal) throw std::invalid_argument("optimal_actions: agent is on the goal");
  const auto dist = bfs_distances(goal);
  const int here = dist[agent.row * kGridSide + agent.col];
  std::vector<Action> best;
  for (int a = 0; a < kNumActions; ++a) {
    const Delta d = delta_of(action_from_index(a));
    const Position q{agent.row + d.drow, agent.col + d.dcol};
    if (!is_interior(q)) continue;  // bouncing off a wall never helps
    if (dist[q.row * kGridSide + q.col] < here) best.push_back(action_from_index(a));
  }
  return best;
}

double trivially_wrong_mass(const std::array<double, 4>& probs, Position agent, Position goal) {
  for (int a = 0; a < kNumActions; ++a) {
    const Delta d = delta_of(action_from_index(a));
    if (Position{agent.row + d.drow, agent.col + d.dcol} == goal) {
      return 1.0 - probs[a];  // everything but the goal-reaching move
    }
  }
  double mass = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    const Delta d = delta_of(action_from_index(a));
    if (!is_interior(Position{agent.row + d.drow, agent.col + d.dcol})) mass += probs[a];
  }
  return mass;
}

std::optional<double> imbalance_sample(const std::array<double, 4>& probs,
                                       std::span<const Action> optimal) {
  if (optimal.size() != 2) return std::nullopt;
  return std::abs(probs[index_of(optimal[0])] - probs[index_of(optimal[1])]);
}

namespace {

// The distribution the test-time policy actually acts from: softmax for
// REINFORCE, a point mass on the greedy move for Q-learning.
std::array<double, 4> acting_distribution(const ModelOutput& out, Method method) {
  if (method == Method::kReinforce) return out.probs;
  int best = 0;
  for (int i = 1; i < 4; ++i) {
    if (out.values[i] > out.values[best]) best = i;
  }
  std::array<double, 4> onehot{};
  onehot[best] = 1.0;
  return onehot;
}

}  // namespace

MetricsRow evaluate_policy(const PolicyModel& model, std::span<const GameInstance> instances,
                           Method method, Rng& rng, int n_episodes_per_instance,
                           StateAveraging averaging) {
  int episodes = 0;
  int completed = 0;
  double extra_moves = 0.0;
  double tw_sum = 0.0;
  std::size_t tw_count = 0;
  double imbalance_sum = 0.0;
  std::size_t imbalance_count = 0;

  for (const GameInstance& instance : instances) {
    for (int ep = 0; ep < n_episodes_per_instance; ++ep) {
      EpisodeState state = initial_state(instance);
      while (!state.done) {
        const ObjectGrid grid = model.encode(instance, state.agent);
        const auto dist = acting_distribution(model.forward(grid), method);
        if (averaging == StateAveraging::kVisited) {
          tw_sum += trivially_wrong_mass(dist, state.agent, instance.goal);
          ++tw_count;
        }
        const auto optimal = optimal_actions(state.agent, instance.goal);
        if (const auto imb = imbalance_sample(dist, optimal)) {
          imbalance_sum += *imb;
          ++imbalance_count;
        }
        const Action action = select_action_test(model, grid, method, rng);
        state = step(instance, state, action).state;
      }
      ++episodes;
      if (state.agent == instance.goal) {
        ++completed;
        extra_moves += state.steps_taken - bfs_min_moves(instance);
      }
    }
    if (averaging == StateAveraging::kAllStates) {
      for (int r = 1; r <= kGridSide - 2; ++r) {
        for (int c = 1; c <= kGridSide - 2; ++c) {
          const Position agent{r, c};
          if (agent == instance.goal) continue;
          const ObjectGrid grid = model.encode(instance, agent);
          const auto dist = acting_distribution(model.forward(grid), method);
          tw_sum += trivially_wrong_mass(dist, agent, instance.goal);
          ++tw_count;
        }
      }
    }
  }

  MetricsRow row;
  row.completion = episodes > 0 ? static_cast<double>(completed) / episodes : 0.0;
  if (completed > 0) row.over_minimum = extra_moves / completed;
  row.trivially_wrong = tw_count > 0 ? tw_sum / static_cast<double>(tw_count) : 0.0;
  if (imbalance_count > 0) row.imbalance = imbalance_sum / static_cast<double>(imbalance_count);
  return row;
}

MetricsRow aggregate_runs(std::span<const MetricsRow> rows) {
  if (rows.empty()) throw std::invalid_argument("aggregate_runs: no rows");
  MetricsRow mean;
  double over_sum = 0.0, imb_sum = 0.0;
  std::size_t over_n = 0, imb_n = 0;
  for (const MetricsRow& r : rows) {
    mean.completion += r.completion;
    mean.trivially_wrong += r.trivially_wrong;
    if (r.over_minimum) {
      over_sum += *r.over_minimum;
      ++over_n;
    }
    if (r.imbalance) {
      imb_sum += *r.imbalance;
      ++imb_n;
    }
  }
  mean.completion /= static_cast<double>(rows.size());
  mean.trivially_wrong /= static_cast<double>(rows.size());
  if (over_n > 0) mean.over_minimum = over_sum / static_cast<double>(over_n);
  if (imb_n > 0) mean.imbalance = imb_sum / static_cast<double>(imb_n);
  return mean;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string metrics_csv_record(const std::string& method, const std::string& head,
                               const std::string& representation, int n_train,
                               std::uint64_t seed, const MetricsRow& row) {
  std::string out = method + ',' + head + ',' + representation + ',' +
                    std::to_string(n_train) + ',' + std::to_string(seed) + ',' +
                    format_double(row.completion) + ',';
  if (row.over_minimum) out += format_double(*row.over_minimum);
  out += ',';
  out += format_double(row.trivially_wrong);
  out += ',';
  if (row.imbalance) out += format_double(*row.imbalance);
  return out;
}

}  // namespace gridxp
