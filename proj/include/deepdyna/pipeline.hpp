#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deepdyna/agents.hpp"
#include "deepdyna/config.hpp"
#include "deepdyna/dbn.hpp"
#include "deepdyna/envs.hpp"
#include "deepdyna/eval.hpp"
#include "deepdyna/io.hpp"
#include "deepdyna/linear_model.hpp"
#include "deepdyna/temporal.hpp"

namespace deepdyna {

/// A required input of a stage is absent; names the stage that makes it.
class MissingInput : public std::runtime_error {
 public:
  MissingInput(const std::string& what, std::string stage)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct World {
  EnvKind kind = EnvKind::chain;
  TabularMdp env;
  ObservationMap map;
};

/// Environment and observation map for a config. Synthetic observations are
/// drawn from the "observations" stream of the config seed.
World build_world(const ExperimentConfig& cfg);

/// Builds per-class pools from an IDX image file and its label file; the
/// template of a class is its pool mean.
ObservationMap observations_from_idx(const std::filesystem::path& images,
                                     const std::filesystem::path& labels, std::size_t n_classes,
                                     std::size_t per_class);

/// Uniform-random-policy transitions for world model `index`.
Dataset generate_dataset(const ExperimentConfig& cfg, const World& world, std::size_t index);

struct TvCheckpoint {
  std::size_t action = 0;
  std::size_t epoch = 0;
  double kernel_tv = 0.0;
};

struct WorldModelBundle {
  DbnStack stack;
  TemporalModelSet temporal;
  RewardModel reward;
  LinearExpectationModel linear;
  std::optional<ClassifierHead> classifier;  // single-action worlds only
  std::vector<TvCheckpoint> checkpoints;
  double reconstruction_error = 0.0;
};

using ProgressFn = std::function<void(const std::string& message)>;

/// Greedy stack (plus fine-tuning when configured), per-action temporal
/// models with kernel-TV checkpoints every `checkpoint_every` epochs
/// (epoch 0 included), reward model, linear expectation model and, for
/// single-action worlds, the observation classifier.
WorldModelBundle train_world_model(const ExperimentConfig& cfg, const World& world,
                                   const Dataset& data, std::size_t index,
                                   const ProgressFn& progress = {});

enum class AgentKind { model_free, dyna_generative, dyna_linear, dyna_oracle };
AgentKind parse_agent_kind(const std::string& name);
const char* to_string(AgentKind kind);

/// Builds the world model used by an agent kind; null for model-free.
/// Generative simulated rewards come from the environment's reward on the
/// nearest class (chain) or from the logistic reward model (grid). The
/// result may refer to `world` and `bundle`, which must outlive it.
std::unique_ptr<WorldModel> make_world_model(AgentKind kind, const World& world,
                                             const WorldModelBundle& bundle);

struct Workers {
  std::size_t count = 1;
  /// Runs fn(i) for i in [0, n) on up to `count` threads.
  void for_each(std::size_t n, const std::function<void(std::size_t)>& fn) const;
};

/// Stage directories under the output directory.
std::filesystem::path stage_dir(const ExperimentConfig& cfg, const std::string& stage);
std::filesystem::path dataset_path(const ExperimentConfig& cfg, std::size_t index);
std::filesystem::path model_dir(const ExperimentConfig& cfg, std::size_t index);

/// Loads a trained bundle written by cmd_train_model.
WorldModelBundle load_world_model(const ExperimentConfig& cfg, std::size_t index);

/// Stage commands. Each writes its outputs under output_dir/<stage>/ along
/// with manifest.txt (config hash, seed, file list) and config.ini.
void cmd_gen_data(const ExperimentConfig& cfg, const ProgressFn& progress = {});
void cmd_train_model(const ExperimentConfig& cfg, const ProgressFn& progress = {});
void cmd_run(const ExperimentConfig& cfg, AgentKind agent, const ProgressFn& progress = {});
/// With `self_check`, the environment is compared with itself.
void cmd_eval(const ExperimentConfig& cfg, bool self_check = false,
              const ProgressFn& progress = {});

}  // namespace deepdyna
