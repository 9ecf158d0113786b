// Experiment CLI: run the train/test matrix, render result tables, trace
// single episodes against a checkpoint, and verify the property suites.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridxp/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIncomplete = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;

bool parse_position(const std::string& text, gridxp::Position& out) {
  int r = 0, c = 0;
  if (std::sscanf(text.c_str(), "%d,%d", &r, &c) != 2) return false;
  out = gridxp::Position{r, c};
  return gridxp::is_interior(out);
}

void print_criteria(const std::vector<gridxp::CriterionResult>& results, bool& all_passed) {
  for (const auto& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) std::cout << " — " << r.detail;
    std::cout << '\n';
    all_passed = all_passed && r.passed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gridworld extrapolation experiments"};
  app.require_subcommand(1);

  gridxp::ExperimentSpec spec;
  std::vector<std::string> variant_flags;
  std::vector<int> size_flags;

  CLI::App* run = app.add_subcommand("run", "run the experiment matrix (or a slice of it)");
  run->set_config("--config", "", "flat key=value configuration file");
  run->add_option("--variant", variant_flags, "variant name(s); default: all five");
  run->add_option("--n-train", size_flags, "train-set size(s); default: 16 8 4 2 1");
  run->add_option("--seeds", spec.n_seeds, "runs per cell");
  run->add_option("--base-seed", spec.base_seed, "seed of the first run; run k uses base+k");
  run->add_option("--n-test", spec.n_test, "test instances per run");
  run->add_option("--out", spec.out_dir, "output directory (results are appended + resumed)");
  run->add_option("--workers", spec.workers, "parallel cells; each cell stays sequential");
  run->add_flag("--checkpoints", spec.save_checkpoints, "save a model checkpoint per cell");
  run->add_option("--gamma", spec.base_config.gamma, "discount factor");
  run->add_option("--learning-rate", spec.base_config.learning_rate, "Adam learning rate");
  run->add_option("--batch-size", spec.base_config.batch_size, "minibatch size");
  run->add_option("--epochs", spec.base_config.epochs, "training epochs");
  run->add_option("--grad-clip", spec.base_config.grad_clip, "componentwise gradient clip");
  run->add_option("--f0", spec.base_config.f0, "initial entropy coefficient");
  run->add_option("--f-decay", spec.base_config.f_decay, "per-epoch entropy coefficient factor");
  run->add_option("--epsilon", spec.base_config.epsilon_explore, "Q-learning exploration rate");

  std::string report_dir = "results";
  int table_id = 0;
  CLI::App* report = app.add_subcommand("report", "render one of the five result tables");
  report->add_option("--out", report_dir, "results directory to read");
  report->add_option("--table", table_id, "table id 1..5")->required()->check(CLI::Range(1, 5));

  std::string ckpt_path, start_text = "4,4", goal_text = "1,1", method_text = "reinforce";
  std::uint64_t trace_seed = 1;
  CLI::App* trace = app.add_subcommand("trace", "step-by-step episode trace for a checkpoint");
  trace->add_option("--checkpoint", ckpt_path, "model checkpoint")->required();
  trace->add_option("--start", start_text, "start cell as row,col (interior)");
  trace->add_option("--goal", goal_text, "goal cell as row,col (interior)");
  trace->add_option("--seed", trace_seed, "rng seed for stochastic action choice");
  trace->add_option("--method", method_text, "q or reinforce")
      ->check(CLI::IsMember({"q", "reinforce"}));

  CLI::App* verify = app.add_subcommand("verify", "run the exact property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (run->parsed()) {
      spec.variants = variant_flags;
      if (!size_flags.empty()) spec.train_sizes = size_flags;
      for (const std::string& name : spec.variants) {
        if (!gridxp::find_variant(name)) {
          std::cerr << "unknown variant: " << name << '\n';
          return kExitConfigError;
        }
      }
      const gridxp::ResultsTable table = gridxp::run_matrix(spec);
      std::cout << table.rows().size() << " raw rows in " << spec.out_dir << '\n';
      if (table.failure_count() > 0) {
        std::cerr << table.failure_count() << " cell(s) failed numerically\n";
        return kExitNumericalFailure;
      }
      return kExitOk;
    }

    if (report->parsed()) {
      const gridxp::ResultsTable table = gridxp::load_results(report_dir);
      const gridxp::Report rendered = gridxp::emit_report(table, table_id);
      std::cout << rendered.markdown;
      const auto csv_path =
          std::filesystem::path(report_dir) / ("table_" + std::to_string(table_id) + ".csv");
      std::ofstream csv(csv_path);
      csv << rendered.csv;
      std::cout << "\nCSV written to " << csv_path.string() << '\n';
      return rendered.complete ? kExitOk : kExitIncomplete;
    }

    if (trace->parsed()) {
      gridxp::Position start, goal;
      if (!parse_position(start_text, start) || !parse_position(goal_text, goal) ||
          start == goal) {
        std::cerr << "start/goal must be distinct interior cells given as row,col\n";
        return kExitConfigError;
      }
      const gridxp::Method method =
          method_text == "q" ? gridxp::Method::kQLearning : gridxp::Method::kReinforce;
      std::cout << gridxp::trace_episode(ckpt_path, gridxp::GameInstance{start, goal}, method,
                                         trace_seed);
      return kExitOk;
    }

    if (verify->parsed()) {
      bool all_passed = true;
      print_criteria(gridxp::run_property_suite(), all_passed);
      print_criteria({gridxp::fresh_model_trivially_wrong()}, all_passed);
      return all_passed ? kExitOk : kExitIncomplete;
    }
  } catch (const gridxp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (epoch " << e.epoch << ")\n";
    return kExitNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitOk;
}
