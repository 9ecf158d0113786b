#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridxp/evaluation.hpp"
#include "gridxp/training.hpp"

namespace gridxp {

// One named method variant of the experiment matrix.
struct VariantDef {
  std::string name;
  Method method;
  Representation representation;
  HeadKind head;
  bool entropy;
};

// The five standard variants, in report-table order (tables 1..5).
const std::vector<VariantDef>& standard_variants();
const VariantDef* find_variant(const std::string& name);

struct ExperimentSpec {
  std::vector<std::string> variants;          // empty = all five
  std::vector<int> train_sizes{16, 8, 4, 2, 1};
  int n_seeds = 20;
  std::uint64_t base_seed = 1;
  int n_test = 10;
  std::string out_dir = "results";
  int workers = 1;
  bool save_checkpoints = false;
  TrainConfig base_config;  // method/representation/head/entropy set per variant
};

// One run's persisted result: the test-side and train-side metric rows.
struct RawRow {
  std::string variant;
  int n_train = 0;
  std::uint64_t seed = 0;
  MetricsRow test;
  MetricsRow train;
  bool failed = false;  // training went non-finite
};

class ResultsTable {
 public:
  void add(RawRow row);
  const std::vector<RawRow>& rows() const { return rows_; }
  bool has(const std::string& variant, int n_train, std::uint64_t seed) const;
  std::vector<const RawRow*> cell(const std::string& variant, int n_train) const;
  // Mean over a cell's non-failed runs; nullopt when the cell is empty.
  std::optional<MetricsRow> mean_test(const std::string& variant, int n_train) const;
  std::optional<MetricsRow> mean_train(const std::string& variant, int n_train) const;
  int failure_count() const;

 private:
  std::vector<RawRow> rows_;
};

// Executes every missing (variant, size, seed) cell of the spec, appending
// raw rows to <out_dir>/results_test.csv and results_train.csv as each cell
// finishes; existing rows are loaded first, so interrupted matrices resume.
// Cells run across `workers` threads; each cell is internally sequential
// and fully determined by its seed.
ResultsTable run_matrix(const ExperimentSpec& spec);

// Reads previously persisted rows (empty table when the files don't exist).
ResultsTable load_results(const std::string& out_dir);

struct Report {
  std::string markdown;
  std::string csv;
  bool complete = true;  // false when cells are missing (rendered as gaps)
};

// Reproduction of one of the five result tables (values rounded to 2
// decimals, train sizes descending 16 -> 1).
Report emit_report(const ResultsTable& table, int table_id);

// Step-by-step ASCII board trace with per-step Q-values or policy
// probabilities; flags position 2-cycles.
std::string trace_episode(const std::string& checkpoint_path, const GameInstance& instance,
                          Method method, std::uint64_t seed);

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Exact, fast property checks (equivariance, gradients, masks, oracle,
// determinism). Needs no experiment data.
std::vector<CriterionResult> run_property_suite(std::uint64_t seed = 20240901);

// Trivially-wrong mass of freshly initialized policies, expected ~0.22.
CriterionResult fresh_model_trivially_wrong(std::uint64_t seed = 7);

// Banded reproduction checks over a completed experiment matrix.
std::vector<CriterionResult> run_quantitative_criteria(const ResultsTable& table);

}  // namespace gridxp
