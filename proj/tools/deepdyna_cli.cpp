// deepdyna: command-line runner for the experiment pipeline.
//
//   deepdyna gen-data    --preset desk-grid --out out/grid
//   deepdyna train-model --preset desk-grid --out out/grid
//   deepdyna run         --preset desk-grid --out out/grid --agent dyna-generative
//   deepdyna eval        --preset desk-grid --out out/grid
//
// Errors go to stderr as a single line "error: <category>: <message>".

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "deepdyna/config.hpp"
#include "deepdyna/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> workers;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "INI config file");
  cmd->add_option("--preset", f.preset_name, "desk-chain | desk-grid | full-chain | full-grid");
  cmd->add_option("--seed", f.seed, "overrides experiment.seed");
  cmd->add_option("--out", f.out, "overrides experiment.output_dir");
  cmd->add_option("--workers", f.workers, "overrides experiment.workers");
  cmd->add_flag("--quiet", f.quiet, "suppress progress messages");
}

deepdyna::ExperimentConfig resolve(const CommonFlags& f) {
  if (!f.config_path.empty() && !f.preset_name.empty())
    throw deepdyna::ConfigError("config: pass either --config or --preset, not both");
  deepdyna::ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = deepdyna::load_config(f.config_path);
  else if (!f.preset_name.empty()) cfg = deepdyna::preset(f.preset_name);
  else throw deepdyna::ConfigError("config: one of --config or --preset is required");
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.workers) cfg.workers = *f.workers;
  cfg.validate();
  return cfg;
}

int fail(const std::string& category, const std::string& message) {
  std::string line = message;
  for (char& c : line)
    if (c == '\n') c = ' ';
  std::cerr << "error: " << category << ": " << line << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep generative Dyna experiment runner"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string agent = "model-free";
  bool self_check = false;
  std::string preset_to_print;

  auto* gen = app.add_subcommand("gen-data", "collect transition datasets");
  auto* train = app.add_subcommand("train-model", "train world models from the datasets");
  auto* run = app.add_subcommand("run", "run an agent and write learning curves");
  auto* eval = app.add_subcommand("eval", "write value, kernel TV, k-step TV and walk metrics");
  auto* show = app.add_subcommand("show-config", "print a preset or config file as INI");
  for (auto* cmd : {gen, train, run, eval, show}) add_common(cmd, flags);
  run->add_option("--agent", agent, "model-free | dyna-generative | dyna-linear | dyna-oracle");
  eval->add_flag("--self-check", self_check, "compare the environment with itself");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  const deepdyna::ProgressFn progress = [&](const std::string& msg) {
    if (!flags.quiet) std::cerr << msg << '\n';
  };

  try {
    const deepdyna::ExperimentConfig cfg = resolve(flags);
    if (*gen) deepdyna::cmd_gen_data(cfg, progress);
    else if (*train) deepdyna::cmd_train_model(cfg, progress);
    else if (*run) deepdyna::cmd_run(cfg, deepdyna::parse_agent_kind(agent), progress);
    else if (*eval) deepdyna::cmd_eval(cfg, self_check, progress);
    else std::cout << deepdyna::render_config(cfg);
  } catch (const deepdyna::ConfigError& e) {
    return fail("config", e.what());
  } catch (const deepdyna::MissingInput& e) {
    return fail("missing-input", e.what());
  } catch (const deepdyna::ArchiveError& e) {
    return fail(e.code() == deepdyna::ArchiveError::Code::io ? "io" : "archive", e.what());
  } catch (const deepdyna::TrainingDiverged& e) {
    return fail("divergence", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("io", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("invalid-argument", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
