#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "deepdyna/numeric.hpp"

namespace deepdyna {

/// Per-action expectation model: E[φ'] = F_a·φ and E[r] = b_a·φ. Columns of
/// F_a index the current features.
struct LinearExpectationModel {
  std::vector<Matrix> transition;  // d × d per action
  std::vector<Vector> reward;      // d per action

  std::size_t feature_size() const { return reward.empty() ? 0 : reward.front().size(); }
  std::size_t n_actions() const { return transition.size(); }

  static LinearExpectationModel zeros(std::size_t n_actions, std::size_t d);
  void validate() const;
  friend bool operator==(const LinearExpectationModel&, const LinearExpectationModel&) = default;
};

struct FeatureTransition {
  Vector phi;
  std::size_t action = 0;
  double reward = 0.0;
  Vector phi_next;
};

/// One stochastic-gradient step on a single transition.
void linear_model_update(LinearExpectationModel& model, const FeatureTransition& t, double lr);

/// Zero-initialized model trained by `sweeps` in-order passes over the data.
LinearExpectationModel train_linear(const std::vector<FeatureTransition>& transitions,
                                    std::size_t n_actions, double lr, std::size_t sweeps);

struct LinearPrediction {
  Vector phi_next;
  double reward = 0.0;
};

LinearPrediction predict_linear(const LinearExpectationModel& model, std::span<const double> phi,
                                std::size_t action);

/// Feeds expectations forward K times; deterministic.
std::vector<Vector> linear_rollout(const LinearExpectationModel& model,
                                   std::span<const double> phi_0,
                                   std::span<const std::size_t> actions, std::size_t K);

}  // namespace deepdyna
