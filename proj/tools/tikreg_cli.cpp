// Command-line front end: one subcommand per experiment, plus `validate`
// and `assumptions`.
//
// Exit codes: 0 success, 2 config error, 3 precondition or (with
// --strict-assumptions) assumption failure, 4 resource cap.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tikreg/errors.hpp"
#include "tikreg/experiments.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<std::string> format;
  unsigned threads = 1;
  bool strict = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--output", f.output, "output path (default: config output.path, else stdout)");
  cmd->add_option("--seed", f.seed, "overrides mc.seed");
  cmd->add_option("--replications", f.replications, "overrides mc.replications");
  cmd->add_option("--format", f.format, "csv or json-lines")->check(CLI::IsMember({"csv", "json-lines"}));
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--strict-assumptions", f.strict, "exit 3 if any assumption report fails");
}

tikreg::ExperimentConfig effective_config(const Flags& f) {
  auto cfg = tikreg::load_config(f.config);
  if (f.seed) cfg.mc.seed = *f.seed;
  if (f.replications) cfg.mc.replications = *f.replications;
  if (f.format) cfg.output.format = *f.format == "csv" ? tikreg::OutputFormat::csv : tikreg::OutputFormat::json_lines;
  if (f.output) cfg.output.path = *f.output;
  return cfg;
}

void emit(const std::string& text, const tikreg::ExperimentConfig& cfg) {
  if (cfg.output.path) {
    tikreg::write_file_atomically(*cfg.output.path, text);
  } else {
    std::cout << text;
  }
}

bool all_hold(const std::vector<tikreg::AssumptionReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.holds; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tikhonov filters and minimax risk for Gaussian sequence-space inverse problems"};
  app.require_subcommand(1);
  Flags flags;

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"weights", "export filter weights"},
      {"risk", "exact and Monte Carlo risk of a filter at a signal"},
      {"suprisk", "worst-case risk of a filter over the ball"},
      {"minimax-check", "compare minimax-linear weights against perturbations"},
      {"lower-bound", "Bayes-risk lower bound and ball-exclusion diagnostics"},
      {"convergence", "sharp-rate convergence study over an epsilon grid"},
      {"simulate", "draw one observation"},
  };
  for (const auto& [name, help] : experiments) add_common(app.add_subcommand(name, help), flags);
  add_common(app.add_subcommand("validate", "check a config without running it"), flags);
  add_common(app.add_subcommand("assumptions", "assumption reports only"), flags);

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    auto cfg = effective_config(flags);
    if (sub == "validate") {
      tikreg::make_problem(cfg);
      std::cout << "ok\n";
      return 0;
    }
    if (sub == "assumptions") {
      const auto problem = tikreg::make_problem(cfg);
      tikreg::ExperimentResult result;
      result.config = tikreg::echoed_config(cfg);
      result.assumptions = tikreg::assumption_reports(cfg, problem);
      emit(tikreg::render(result, cfg.output.format), cfg);
      return (flags.strict && !all_hold(result.assumptions)) ? 3 : 0;
    }
    cfg.experiment = *tikreg::parse_experiment_kind(sub);
    const auto result = tikreg::run(cfg, {flags.threads});
    emit(tikreg::render(result, cfg.output.format), cfg);
    std::cerr << sub << ": done in " << result.wall_seconds << " s\n";
    if (flags.strict && !all_hold(result.assumptions)) {
      std::cerr << "assumption check failed\n";
      return 3;
    }
    return 0;
  } catch (const tikreg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const tikreg::ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << " (achieved tail bound " << e.achieved_tail_bound() << ")\n";
    return 4;
  } catch (const tikreg::Error& e) {
    std::cerr << "precondition failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
