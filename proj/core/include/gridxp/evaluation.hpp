#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridxp/gridworld.hpp"
#include "gridxp/model.hpp"
#include "gridxp/training.hpp"

namespace gridxp {

// Metrics for one evaluation pass. over_minimum is averaged over completed
// games only (absent when none completed); imbalance is present only when
// at least one visited state had two equally optimal moves.
struct MetricsRow {
  double completion = 0.0;
  std::optional<double> over_minimum;
  double trivially_wrong = 0.0;
  std::optional<double> imbalance;
};

// Shortest action-sequence length from start to goal (breadth-first search;
// with no interior walls it equals the Manhattan distance).
int bfs_min_moves(const GameInstance& instance);

// Actions whose successor strictly decreases the BFS distance to the goal;
// one or two of them, sorted by index, never into a wall.
std::vector<Action> optimal_actions(Position agent, Position goal);

// Probability mass on moves provably sub-optimal from the 4-neighborhood:
// when the goal is adjacent, everything except the goal-reaching move;
// otherwise the mass on moves into adjacent walls.
double trivially_wrong_mass(const std::array<double, 4>& probs, Position agent, Position goal);

// |p_a - p_b| when exactly two moves are optimal; absent otherwise.
std::optional<double> imbalance_sample(const std::array<double, 4>& probs,
                                       std::span<const Action> optimal);

// Whether trivially_wrong averages over states visited by the evaluation
// episodes or over all 25 interior agent positions of each instance.
enum class StateAveraging { kVisited, kAllStates };

// Plays episodes with select_action_test and accumulates the four metrics.
MetricsRow evaluate_policy(const PolicyModel& model, std::span<const GameInstance> instances,
                           Method method, Rng& rng, int n_episodes_per_instance = 1,
                           StateAveraging averaging = StateAveraging::kVisited);

// Fieldwise arithmetic means; optional fields averaged where present.
MetricsRow aggregate_runs(std::span<const MetricsRow> rows);

// One CSV record, fixed column order:
// method,head,representation,n_train,seed,completion,over_min,trivially_wrong,imbalance
// (absent optionals serialize as empty fields).
std::string metrics_csv_record(const std::string& method, const std::string& head,
                               const std::string& representation, int n_train,
                               std::uint64_t seed, const MetricsRow& row);
inline constexpr const char* kMetricsCsvHeader =
    "method,head,representation,n_train,seed,completion,over_min,trivially_wrong,imbalance";

}  // namespace gridxp
