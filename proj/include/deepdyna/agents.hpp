#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "deepdyna/dbn.hpp"
#include "deepdyna/envs.hpp"
#include "deepdyna/linear_model.hpp"
#include "deepdyna/numeric.hpp"
#include "deepdyna/temporal.hpp"

namespace deepdyna {

struct TabularValue {
  Vector values;
};

/// V(s) += α·(r + γ·V(s')·[not done] − V(s))
void td0_update_tabular(TabularValue& v, std::size_t s, double r, std::size_t s_next,
                        double alpha, double gamma, bool done);

/// θ += α·(r + γ·θ·φ'·[not done] − θ·φ)·φ
void td0_update_linear(Vector& theta, std::span<const double> phi, double r,
                       std::span<const double> phi_next, double alpha, double gamma, bool done);

/// Uniform action with probability ε, otherwise the lowest-index argmax.
std::size_t epsilon_greedy(std::span<const double> q, double epsilon, Rng& rng);

/// One linear approximator per action: Q(φ, a) = θ_a·φ.
struct LinearQ {
  std::vector<Vector> theta;

  static LinearQ zeros(std::size_t n_actions, std::size_t d);
  std::size_t n_actions() const { return theta.size(); }
  std::size_t feature_size() const { return theta.empty() ? 0 : theta.front().size(); }
  Vector values(std::span<const double> phi) const;
  friend bool operator==(const LinearQ&, const LinearQ&) = default;
};

/// θ_a += α·(r + γ·θ_{a'}·φ'·[not done] − θ_a·φ)·φ
void sarsa_update(LinearQ& q, std::span<const double> phi, std::size_t a, double r,
                  std::span<const double> phi_next, std::size_t a_next, double alpha,
                  double gamma, bool done);

struct AgentConfig {
  double alpha = 0.001;
  double alpha_sim = 0.001;
  double alpha_sim_decay = 0.95;
  double alpha_sim_floor = 0.0001;
  double gamma = 0.9;
  double epsilon = 0.9;
  double epsilon_decay = 0.9;
  double epsilon_floor = 0.05;
  std::size_t K = 0;
  std::size_t max_episode_steps = 1000;

  void validate() const;
};

/// ε and the simulated-experience learning rate, decayed only at real
/// episode boundaries.
struct ExplorationSchedule {
  double epsilon;
  double alpha_sim;

  explicit ExplorationSchedule(const AgentConfig& cfg)
      : epsilon(cfg.epsilon), alpha_sim(cfg.alpha_sim) {}
  void end_episode(const AgentConfig& cfg);
};

struct SimulatedStep {
  Vector observation;
  double reward = 0.0;
  bool done = false;
};

/// Anything that can fantasize a transition from an observation.
class WorldModel {
 public:
  virtual ~WorldModel() = default;
  virtual std::size_t n_actions() const = 0;
  virtual SimulatedStep simulate(std::span<const double> observation, std::size_t action,
                                 Rng& rng) const = 0;
};

/// The true MDP behind an observation map; observations are mapped back to
/// states by nearest template.
class OracleWorldModel final : public WorldModel {
 public:
  OracleWorldModel(const TabularMdp& env, const ObservationMap& map) : env_(env), map_(map) {}
  std::size_t n_actions() const override { return env_.n_actions(); }
  SimulatedStep simulate(std::span<const double> observation, std::size_t action,
                         Rng& rng) const override;

 private:
  const TabularMdp& env_;
  const ObservationMap& map_;
};

/// Reward and termination assigned to a simulated observation.
using OutcomeFn = std::function<std::pair<double, bool>(std::span<const double> observation)>;

/// Logistic reward predictor. With `terminates`, a predicted reward also
/// ends the episode.
OutcomeFn reward_model_outcome(const RewardModel& model, bool terminates = true);
/// Environment reward (and terminal flag) of the nearest-class decoded state.
OutcomeFn nearest_class_outcome(const TabularMdp& env, const ObservationMap& map);

/// Deep generative model: autoencoder stack + per-action temporal layers.
class GenerativeWorldModel final : public WorldModel {
 public:
  GenerativeWorldModel(const DbnStack& stack, const TemporalModelSet& models,
                       std::size_t n_actions, OutcomeFn outcome);
  std::size_t n_actions() const override { return n_actions_; }
  SimulatedStep simulate(std::span<const double> observation, std::size_t action,
                         Rng& rng) const override;

 private:
  const DbnStack& stack_;
  const TemporalModelSet& models_;
  std::size_t n_actions_;
  OutcomeFn outcome_;
};

/// Linear expectation model; the expected reward is thresholded at
/// `done_threshold` to decide termination.
class LinearWorldModel final : public WorldModel {
 public:
  explicit LinearWorldModel(const LinearExpectationModel& model, double done_threshold = 0.5)
      : model_(model), done_threshold_(done_threshold) {}
  std::size_t n_actions() const override { return model_.n_actions(); }
  SimulatedStep simulate(std::span<const double> observation, std::size_t action,
                         Rng& rng) const override;

 private:
  const LinearExpectationModel& model_;
  double done_threshold_;
};

struct EpisodeRecord {
  std::size_t episode = 0;
  double undiscounted_return = 0.0;
  double discounted_return = 0.0;
  std::size_t steps = 0;
  std::size_t cumulative_steps = 0;
  double epsilon = 0.0;
  double alpha_sim = 0.0;
};

struct ControlResult {
  LinearQ q;
  std::vector<EpisodeRecord> curve;
};

/// Episodic SARSA with linear function approximation over observations.
ControlResult run_model_free(const TabularMdp& env, const ObservationMap& map,
                             const AgentConfig& cfg, std::size_t episodes, Rng& rng);

/// SARSA plus, after each real step, cfg.K simulated steps rooted at the
/// real observation the step started from. A simulated termination restarts
/// the rollout at the root. With K = 0 (or no model) this is run_model_free.
ControlResult run_dyna(const TabularMdp& env, const ObservationMap& map, const WorldModel* model,
                       const AgentConfig& cfg, std::size_t episodes, Rng& rng);

/// Greedy action per state from the given per-state features.
std::vector<std::size_t> extract_policy(const LinearQ& q, const std::vector<Vector>& state_features);

enum class ValueScheme { tabular, linear };

/// Maps an observation to a table index for the tabular scheme.
using StateLabeler = std::function<std::size_t(std::span<const double> observation)>;

struct EvaluationConfig {
  ValueScheme scheme = ValueScheme::tabular;
  double alpha = 0.02;
  double alpha_sim = 0.02;
  std::size_t updates = 400000;  // real environment steps
  std::size_t checkpoint_every = 10000;
  std::size_t K = 0;
};

struct ValueCheckpoint {
  std::size_t updates = 0;
  double value_error = 0.0;
};

struct EvaluationResult {
  Vector estimates;  // per state
  std::vector<ValueCheckpoint> curve;
};

/// TD(0) policy evaluation on a single-action environment. The tabular
/// scheme indexes the table with `labeler` (true state ids when empty); the
/// linear scheme learns θ over observations and reports, per state, the mean
/// prediction over that state's observation pool. Dyna adds K simulated
/// TD updates per real step, rooted at the current observation.
EvaluationResult evaluate_td(const TabularMdp& env, const ObservationMap& map,
                             const Vector& true_values, const EvaluationConfig& cfg,
                             const StateLabeler& labeler, const WorldModel* model, Rng& rng);

/// Per-state value estimate of a linear θ: mean of θ·x over the state's pool.
Vector pooled_linear_values(const Vector& theta, const ObservationMap& map);

}  // namespace deepdyna
