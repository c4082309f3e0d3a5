#pragma once

#include <string>
#include <vector>

namespace difflab {

//! One acceptance-table row. `measured comparator threshold` states the
//! check; detail carries the supporting numbers.
struct CriterionResult {
  int index = 0;
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string comparator = "<=";
  bool pass = false;
  std::string detail;
  double seconds = 0.0;  // wall time; printed by the gate, never persisted
};

//! Runs the eleven-point acceptance suite. threads > 1 evaluates criteria
//! concurrently; rows come back in criterion order either way. A criterion
//! that throws becomes a failing row carrying the error text.
std::vector<CriterionResult> run_acceptance_suite(int threads = 1);

//! Extra rows of the "full" suite: grid-refinement studies on top of the
//! acceptance set.
std::vector<CriterionResult> run_refinement_study();

//! Runs the named suite ("acceptance" or "full"), writes summary.csv and
//! summary.json (one row per criterion) into out_dir, and returns the number
//! of failing rows. Unknown suite names throw ConfigError.
int regenerate_tables(const std::string& suite, const std::string& out_dir,
                      int threads = 1);

//! CSV serialization shared by the table writer and the gate binary.
std::string criteria_csv(const std::vector<CriterionResult>& rows);

}  // namespace difflab
