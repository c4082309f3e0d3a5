#pragma once

#include <string>

#include "difflab/config.hpp"

namespace difflab {

struct RunOutcome {
  bool pass = false;
  std::string summary;      // one-line verdict for terminal output
  std::string report_json;  // contents of the persisted report.json
};

//! Executes the configured experiment: runs the relevant modules, writes
//! report.json plus CSV and field dumps under cfg.out_dir, and returns the
//! verdict. The report embeds the resolved configuration, so re-running from
//! it reproduces the results byte for byte. Module errors propagate.
RunOutcome run_experiment(const ExperimentConfig& cfg);

}  // namespace difflab
