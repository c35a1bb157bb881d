#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <span>
#include <vector>

#include "deepdyna/numeric.hpp"
#include "deepdyna/rbm.hpp"

namespace deepdyna {

/// Ground-truth MDP. Rewards attach to the arrived-at state: r_{t+1} = R[s_{t+1}].
/// Terminal states self-loop with reward 0 under every action.
struct TabularMdp {
  std::size_t n_states = 0;
  std::vector<Matrix> transitions;  // per action, n_states × n_states, rows sum to 1
  Vector rewards;
  double gamma = 0.9;
  std::size_t start_state = 0;
  std::vector<bool> terminal;

  std::size_t n_actions() const { return transitions.size(); }
  bool is_terminal(std::size_t s) const { return terminal[s]; }
  void validate() const;
  friend bool operator==(const TabularMdp&, const TabularMdp&) = default;
};

enum GridAction : std::size_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

/// Cyclic chain with a single action: advance with p_advance (wrapping from
/// the last state to the first), otherwise stay.
TabularMdp build_chain_env(std::size_t n_states, double p_advance, std::size_t reward_state,
                           double gamma);

/// rows × cols navigation map, state id = row·cols + col, start at the top
/// left. Moves succeed with p_success and otherwise stay; moves off the map
/// stay deterministically. Reward states pay +1 and end the episode.
TabularMdp build_grid_env(std::size_t rows, std::size_t cols, double p_success,
                          const std::set<std::size_t>& reward_states, double gamma);

/// All state ids in one row of a grid.
std::set<std::size_t> grid_row_states(std::size_t rows, std::size_t cols, std::size_t row);

struct StepResult {
  std::size_t s_next = 0;
  double reward = 0.0;
  bool done = false;
};

StepResult step(const TabularMdp& env, std::size_t s, std::size_t a, Rng& rng);

/// Policy-averaged kernel Σ_a π(a|s)·P_a; policy is n_states × n_actions.
Matrix policy_kernel(const TabularMdp& env, const Matrix& policy);
Matrix uniform_policy(const TabularMdp& env);

/// Per-state image pools. State s is also "class" s: its template is the
/// noise-free image used for nearest-class decoding and canonical roots.
struct ObservationMap {
  std::size_t width = 0;
  std::size_t height = 0;
  VisibleFamily pixel_family = VisibleFamily::binary;
  std::vector<Vector> templates;
  std::vector<std::vector<Vector>> pools;

  std::size_t n_states() const { return pools.size(); }
  std::size_t dim() const { return width * height; }
  const Vector& canonical(std::size_t s) const { return templates.at(s); }
  void validate() const;
  friend bool operator==(const ObservationMap&, const ObservationMap&) = default;
};

Vector observe(const ObservationMap& map, std::size_t s, Rng& rng);

/// Binary glyphs, each the union of two (or, once pairs run out, three) bars
/// drawn on a grid of side at most 8 and upscaled by blocks when the side
/// halves down to it. Every pair of templates differs in at least a quarter
/// of the pixels; variants flip each pixel independently with probability
/// `noise`.
ObservationMap make_synthetic_observations(std::size_t n_classes, std::size_t image_side,
                                           std::size_t variants_per_class, double noise,
                                           Rng& rng);

struct Transition {
  std::size_t s = 0;
  Vector observation;
  std::size_t action = 0;
  double reward = 0.0;
  std::size_t s_next = 0;
  Vector observation_next;
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

using StatePolicy = std::function<std::size_t(std::size_t state, Rng& rng)>;

/// Runs `policy` (uniform random when empty) for n_steps, restarting at the
/// start state whenever an episode ends.
std::vector<Transition> collect_transitions(const TabularMdp& env, const ObservationMap& map,
                                            const StatePolicy& policy, std::size_t n_steps,
                                            Rng& rng);

/// Logistic regression P(r = 1 | x) = sigmoid(w·x + w0).
struct RewardModel {
  Vector weights;
  double bias = 0.0;

  double probability(std::span<const double> x) const;
  /// Binary reward emitted in simulation (threshold 0.5).
  double emit(std::span<const double> x) const { return probability(x) >= 0.5 ? 1.0 : 0.0; }
  friend bool operator==(const RewardModel&, const RewardModel&) = default;
};

struct LogisticGradient {
  double loss = 0.0;
  Vector weights;
  double bias = 0.0;
};

/// Mean binary cross-entropy and its gradient.
LogisticGradient logistic_loss_and_gradient(const RewardModel& model,
                                            const std::vector<Vector>& observations,
                                            const std::vector<double>& rewards);

/// Zero-initialized full-batch gradient descent on the mean cross-entropy.
RewardModel train_reward_model(const std::vector<Vector>& observations,
                               const std::vector<double>& rewards, double lr,
                               std::size_t iterations);

}  // namespace deepdyna
