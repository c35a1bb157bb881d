#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "deepdyna/agents.hpp"
#include "deepdyna/dbn.hpp"
#include "deepdyna/rbm.hpp"
#include "deepdyna/temporal.hpp"

namespace deepdyna {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EnvKind { chain, grid };
enum class ObservationSource { synthetic, idx };
/// What the autoencoder stack is trained on: every observation in the
/// transition dataset, or each state's observation pool once.
enum class StackData { transitions, states };

struct EnvSection {
  EnvKind kind = EnvKind::chain;
  std::size_t states = 10;  // chain
  double p_advance = 0.8;
  std::size_t reward_state = 9;
  std::size_t rows = 5;  // grid
  std::size_t cols = 6;
  double p_success = 0.9;
  std::size_t reward_row = 4;
  double gamma = 0.9;
  friend bool operator==(const EnvSection&, const EnvSection&) = default;
};

struct ObservationSection {
  ObservationSource source = ObservationSource::synthetic;
  std::size_t side = 8;
  std::size_t variants = 10;
  double noise = 0.02;
  std::string idx_images;
  std::string idx_labels;
  std::size_t idx_per_class = 0;  // 0 keeps every image of a class
  friend bool operator==(const ObservationSection&, const ObservationSection&) = default;
};

struct DataSection {
  std::size_t steps = 1000;
  friend bool operator==(const DataSection&, const DataSection&) = default;
};

/// Per-layer lists hold one entry per hidden layer; a single entry is
/// broadcast to every layer.
struct ModelSection {
  std::vector<std::size_t> hidden_sizes{32, 16};
  StackData stack_data = StackData::transitions;
  VisibleFamily bottom_family = VisibleFamily::binary;
  std::vector<std::size_t> layer_epochs{200};
  std::vector<double> layer_learning_rates{0.1};
  std::vector<std::size_t> layer_cd_k{1};
  std::vector<std::size_t> layer_minibatch{10};
  double momentum = 0.5;
  bool deterministic = false;
  double init_stddev = 0.01;
  double finetune_learning_rate = 0.01;
  std::size_t finetune_sweeps = 0;
  std::size_t finetune_minibatch = 10;

  std::size_t temporal_hidden = 64;
  std::size_t temporal_cd_k = 5;
  double temporal_learning_rate = 0.05;
  double temporal_momentum = 0.5;
  std::size_t temporal_epochs = 300;
  std::size_t temporal_minibatch = 10;
  std::size_t gibbs_steps = 20;
  ClampMode clamp = ClampMode::sample;
  std::size_t checkpoint_every = 50;
  std::size_t tv_samples = 20;

  double reward_learning_rate = 0.1;
  std::size_t reward_iterations = 2000;
  double linear_learning_rate = 0.01;
  std::size_t linear_sweeps = 5;

  std::vector<std::size_t> classifier_hidden{32};
  double classifier_learning_rate = 0.1;
  double classifier_momentum = 0.5;
  std::size_t classifier_sweeps = 50;

  std::size_t models = 1;  // independently trained world models

  TrainSchedule schedule(std::size_t input_size) const;
  CdConfig temporal_cd() const;
  SamplingConfig sampling() const;
  friend bool operator==(const ModelSection&, const ModelSection&) = default;
};

struct AgentSection {
  double alpha = 0.001;
  double alpha_sim = 0.001;
  double alpha_sim_decay = 0.95;
  double alpha_sim_floor = 0.0001;
  double epsilon = 0.9;
  double epsilon_decay = 0.9;
  double epsilon_floor = 0.05;
  std::size_t K = 0;
  std::size_t episodes = 100;
  std::size_t max_episode_steps = 1000;
  std::size_t runs_per_model = 10;
  std::size_t baseline_runs = 50;

  double td_alpha_tabular = 0.02;
  std::size_t td_updates_tabular = 400000;
  double td_alpha_linear = 0.01;
  std::size_t td_updates_linear = 1000000;
  std::size_t td_checkpoint_every = 10000;

  AgentConfig agent_config(double gamma) const;
  friend bool operator==(const AgentSection&, const AgentSection&) = default;
};

struct EvalSection {
  std::size_t kstep_max = 20;
  std::size_t kstep_trajectories = 20;
  std::size_t kernel_samples = 50;
  std::size_t walks = 5;
  std::size_t walk_length = 10;
  double optimal_tolerance = 1e-10;
  friend bool operator==(const EvalSection&, const EvalSection&) = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::size_t workers = 1;
  EnvSection env;
  ObservationSection observations;
  DataSection data;
  ModelSection model;
  AgentSection agent;
  EvalSection eval;

  /// Range checks; referenced IDX files must exist.
  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// INI text: [section] headers and `key = value` lines; lists are
/// comma-separated. Unknown sections or keys are rejected.
ExperimentConfig parse_config(const std::string& text);
std::string render_config(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

/// desk-chain, desk-grid, full-chain, full-grid.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// FNV-1a of the rendered config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace deepdyna
