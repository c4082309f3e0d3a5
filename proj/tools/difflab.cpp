#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "difflab/acceptance.hpp"
#include "difflab/config.hpp"
#include "difflab/errors.hpp"
#include "difflab/experiment.hpp"

namespace {

struct SharedFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_shared(CLI::App& cmd, SharedFlags& flags) {
  cmd.add_option("--config", flags.config_path,
                 "Experiment description (JSON)");
  cmd.add_option("--out", flags.out_dir, "Output directory override");
  cmd.add_option("--seed", flags.seed, "Sampling seed override");
  cmd.add_option("--threads", flags.threads, "Worker thread override")
      ->check(CLI::PositiveNumber);
}

difflab::ExperimentConfig load_config(const SharedFlags& flags,
                                      difflab::ExperimentKind kind) {
  difflab::ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = difflab::parse_config_file(flags.config_path);
    if (cfg.kind != kind)
      throw difflab::ConfigError(
          "config: kind '" + difflab::to_string(cfg.kind) +
          "' does not match the '" + difflab::to_string(kind) +
          "' subcommand");
  } else {
    cfg.kind = kind;
  }
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.seed.has_value()) cfg.seed = *flags.seed;
  if (flags.threads.has_value()) cfg.threads = *flags.threads;
  return cfg;
}

int run_kind(const SharedFlags& flags, difflab::ExperimentKind kind) {
  const difflab::ExperimentConfig cfg = load_config(flags, kind);
  const difflab::RunOutcome outcome = difflab::run_experiment(cfg);
  std::cout << outcome.summary << "\n"
            << (outcome.pass ? "PASS" : "FAIL") << " (report in " << cfg.out_dir
            << ")\n";
  return outcome.pass ? 0 : 1;
}

void echo_summary(const std::string& out_dir) {
  std::ifstream csv(out_dir + "/summary.csv");
  std::string line;
  while (std::getline(csv, line)) std::cout << line << "\n";
}

int run_acceptance(const SharedFlags& flags, const std::string& suite) {
  if (!flags.config_path.empty()) {
    if (suite != "acceptance")
      throw difflab::ConfigError(
          "usage: --suite selects the table set and cannot be combined with "
          "--config");
    return run_kind(flags, difflab::ExperimentKind::acceptance);
  }
  std::string out = flags.out_dir.empty() ? "out" : flags.out_dir;
  const int threads = flags.threads.value_or(1);
  const int failures = difflab::regenerate_tables(suite, out, threads);
  echo_summary(out);
  std::cout << (failures == 0 ? "PASS" : "FAIL") << " (" << failures
            << " failing rows, tables in " << out << ")\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Nonlinear-diffusion laboratory: solvers, asymptotic monitors, and the "
      "acceptance tables"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    difflab::ExperimentKind kind;
  };
  const Sub subs[] = {
      {"solve", "Run a solver and dump its snapshots",
       difflab::ExperimentKind::solve},
      {"varadhan", "Small-time limit monitor -4t log u vs d^2",
       difflab::ExperimentKind::varadhan},
      {"pressure", "Rescaled-pressure band monitors across an eps sweep",
       difflab::ExperimentKind::pressure},
      {"barrier", "Self-similar boundary-layer profile and its limits",
       difflab::ExperimentKind::barrier},
      {"symmetry", "Level-set stationarity and curvature detectors",
       difflab::ExperimentKind::symmetry},
      {"manifold", "Geodesic-ball runs on curved model spaces",
       difflab::ExperimentKind::manifold},
  };

  SharedFlags flags[7];
  int which = -1;
  for (int i = 0; i < 6; ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    add_shared(*cmd, flags[i]);
    cmd->callback([&which, i] { which = i; });
  }
  std::string suite = "acceptance";
  CLI::App* acc = app.add_subcommand(
      "acceptance", "Regenerate the acceptance-suite tables");
  add_shared(*acc, flags[6]);
  acc->add_option("--suite", suite, "Table set: acceptance or full")
      ->check(CLI::IsMember({"acceptance", "full"}));
  acc->callback([&which] { which = 6; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (which == 6) return run_acceptance(flags[6], suite);
    return run_kind(flags[which], subs[which].kind);
  } catch (const difflab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
