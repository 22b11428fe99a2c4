// levyheat: scenario runner for non-local Schrodinger heat kernels.
//   levyheat run <config> [--out DIR] [--seed N] [--threads N]
//   levyheat diff <a> <b> [--tol T]
//   levyheat dump-tables <config> [--out DIR]

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "levyheat/scenario.hpp"
#include "levyheat/snapshot.hpp"
#include "levyheat/symbol.hpp"

using namespace levyheat;

namespace {

int env_threads() {
  const char* env = std::getenv("LEVYHEAT_THREADS");
  if (!env) return 0;
  try {
    return std::stoi(env);
  } catch (...) {
    return 0;
  }
}

Scenario load_scenario(const std::string& path, const std::string& out,
                       long seed, int threads) {
  Config cfg = Config::parse_file(path);
  std::vector<std::string> errors;
  Scenario sc = Scenario::from_config(cfg, errors);
  if (!errors.empty()) {
    std::cerr << "invalid scenario:\n";
    for (const auto& e : errors) std::cerr << "  - " << e << "\n";
    throw config_error("scenario validation failed");
  }
  if (!out.empty()) sc.out_dir = out;
  if (seed >= 0) sc.seed = std::uint64_t(seed);
  int t = env_threads();
  if (threads > 0) t = threads;
  if (t > 0) sc.threads = t;
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heat kernels of non-local Schrodinger operators"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long seed = -1;
  int threads = 0;

  auto* run = app.add_subcommand("run", "run the suites of a scenario");
  run->add_option("config", config_path, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "random seed for center scans");
  run->add_option("--threads", threads, "worker threads");

  std::string diff_a, diff_b;
  double diff_tol = 1e-12;
  auto* diff = app.add_subcommand("diff", "compare two kernel snapshots");
  diff->add_option("a", diff_a)->required();
  diff->add_option("b", diff_b)->required();
  diff->add_option("--tol", diff_tol, "max relative difference to accept");

  auto* dump = app.add_subcommand("dump-tables", "write the symbol tables");
  dump->add_option("config", config_path, "scenario file")->required();
  dump->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      Scenario sc = load_scenario(config_path, out_dir, seed, threads);
      RunResult res = run_scenario(sc);
      std::cout << res.report.dump(2) << "\n";
      return res.exit_code;
    }
    if (diff->parsed()) {
      SnapshotDiff d = diff_snapshots(diff_a, diff_b);
      std::cout << d.to_json().dump(2) << "\n";
      return d.max_rel <= diff_tol ? 0 : 1;
    }
    if (dump->parsed()) {
      Scenario sc = load_scenario(config_path, out_dir, seed, threads);
      SymbolTableOptions so;
      so.t_min = sc.t_min;
      so.t_max = sc.t_max;
      so.t0 = sc.t0;
      SymbolTable tab = SymbolTable::build(sc.profile, so);
      std::filesystem::create_directories(sc.out_dir);
      std::ofstream os(sc.out_dir + "/tables.csv");
      os << tab.dump_csv();
      std::cout << "wrote " << sc.out_dir << "/tables.csv\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
