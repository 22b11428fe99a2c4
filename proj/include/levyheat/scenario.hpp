#pragma once

// Config-driven scenario runner: builds the symbol table, kernel grids and
// perturbation series for one profile/potential pair, runs the requested
// verification suites, and writes report.json plus plot-ready CSV data and
// kernel snapshots into the output directory.

#include <json.hpp>
#include <string>

#include "levyheat/config.hpp"

namespace levyheat {

struct RunResult {
  int exit_code = 0;
  nlohmann::json report;
};

// executes suites in dependency order; a numerical failure marks the suite
// failed (and its dependents skipped) without aborting independent suites
RunResult run_scenario(const Scenario& s, bool write_files = true);

}  // namespace levyheat
