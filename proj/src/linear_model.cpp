#include "deepdyna/linear_model.hpp"

namespace deepdyna {

LinearExpectationModel LinearExpectationModel::zeros(std::size_t n_actions, std::size_t d) {
  require(n_actions > 0 && d > 0, "LinearExpectationModel: empty shape");
  LinearExpectationModel m;
  m.transition.assign(n_actions, Matrix(d, d));
  m.reward.assign(n_actions, Vector(d, 0.0));
  return m;
}

void LinearExpectationModel::validate() const {
  require(!transition.empty(), "LinearExpectationModel: no actions");
  require(transition.size() == reward.size(), "LinearExpectationModel: action count mismatch");
  const std::size_t d = feature_size();
  for (std::size_t a = 0; a < transition.size(); ++a)
    if (!(transition[a].rows() == d && transition[a].cols() == d && reward[a].size() == d)) fail("LinearExpectationModel: inconsistent feature size for action " + std::to_string(a));
}

void linear_model_update(LinearExpectationModel& model, const FeatureTransition& t, double lr) {
  if (!(t.action < model.n_actions())) fail("linear_model_update: unknown action " + std::to_string(t.action));
  const std::size_t d = model.feature_size();
  require(t.phi.size() == d && t.phi_next.size() == d, "linear_model_update: dimension mismatch");
  Matrix& F = model.transition[t.action];
  Vector& b = model.reward[t.action];

  Vector err = matvec(F, t.phi);
  for (std::size_t i = 0; i < d; ++i) err[i] = t.phi_next[i] - err[i];
  for (std::size_t i = 0; i < d; ++i) {
    if (err[i] == 0.0) continue;
    axpy(lr * err[i], t.phi, F.row(i));
  }
  const double reward_err = t.reward - dot(b, t.phi);
  axpy(lr * reward_err, t.phi, b);
}

LinearExpectationModel train_linear(const std::vector<FeatureTransition>& transitions,
                                    std::size_t n_actions, double lr, std::size_t sweeps) {
  require(!transitions.empty(), "train_linear: no transitions");
  const std::size_t d = transitions.front().phi.size();
  for (const auto& t : transitions) {
    require(t.phi.size() == d && t.phi_next.size() == d, "train_linear: dimension mismatch");
    if (!(t.action < n_actions)) fail("train_linear: action " + std::to_string(t.action) +
                                      " out of range");
  }
  LinearExpectationModel model = LinearExpectationModel::zeros(n_actions, d);
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep)
    for (const auto& t : transitions) linear_model_update(model, t, lr);
  return model;
}

LinearPrediction predict_linear(const LinearExpectationModel& model, std::span<const double> phi,
                                std::size_t action) {
  if (!(action < model.n_actions())) fail("predict_linear: unknown action " + std::to_string(action));
  require(phi.size() == model.feature_size(), "predict_linear: dimension mismatch");
  return {matvec(model.transition[action], phi), dot(model.reward[action], phi)};
}

std::vector<Vector> linear_rollout(const LinearExpectationModel& model,
                                   std::span<const double> phi_0,
                                   std::span<const std::size_t> actions, std::size_t K) {
  require(K >= 1, "linear_rollout: K must be at least 1");
  require(actions.size() >= K, "linear_rollout: action list shorter than K");
  std::vector<Vector> out;
  out.reserve(K);
  Vector phi(phi_0.begin(), phi_0.end());
  for (std::size_t k = 0; k < K; ++k) {
    phi = predict_linear(model, phi, actions[k]).phi_next;
    out.push_back(phi);
  }
  return out;
}

}  // namespace deepdyna
