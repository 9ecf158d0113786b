// Acceptance gate: runs the full experiment matrix (resumable through the
// CSV files in --out) plus the exact property checks, and prints one
// pass/fail line per criterion. Exit status is 0 only when all pass.
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "gridxp/harness.hpp"

int main(int argc, char** argv) {
  std::string out_dir = "acceptance_results";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      out_dir = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--out <results-dir>]\n", argv[0]);
      return 2;
    }
  }

  std::vector<gridxp::CriterionResult> criteria;

  std::printf("running experiment matrix (resumes from %s)...\n", out_dir.c_str());
  std::fflush(stdout);
  gridxp::ExperimentSpec spec;
  spec.out_dir = out_dir;
  gridxp::ResultsTable table;
  try {
    table = gridxp::run_matrix(spec);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "matrix run failed: %s\n", e.what());
    return 3;
  }

  for (gridxp::CriterionResult& c : gridxp::run_quantitative_criteria(table)) {
    criteria.push_back(std::move(c));
  }
  criteria.push_back(gridxp::fresh_model_trivially_wrong());
  for (gridxp::CriterionResult& c : gridxp::run_property_suite()) {
    criteria.push_back(std::move(c));
  }

  int failures = 0;
  int id = 0;
  for (const gridxp::CriterionResult& c : criteria) {
    ++id;
    std::printf("criterion %2d: %s  %s%s%s%s\n", id, c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.empty() ? "" : "  [", c.detail.c_str(), c.detail.empty() ? "" : "]");
    if (!c.passed) ++failures;
  }
  std::printf("%d/%d criteria passed\n", id - failures, id);
  return failures == 0 ? 0 : 1;
}
