#include "deepdyna/linear_model.hpp"
#include "doctest.h"

using namespace deepdyna;

TEST_SUITE("linear_model") {

TEST_CASE("prediction on a hand example") {
  LinearExpectationModel m = LinearExpectationModel::zeros(1, 2);
  m.transition[0] = Matrix::from_rows({{0, 1}, {1, 0}});
  m.reward[0] = {1, 2};
  const LinearPrediction p = predict_linear(m, Vector{3, 4}, 0);
  CHECK(p.phi_next == Vector{4, 3});
  CHECK(p.reward == 11.0);
  CHECK_THROWS(predict_linear(m, Vector{3, 4}, 1));
}

TEST_CASE("single update step") {
  LinearExpectationModel m = LinearExpectationModel::zeros(2, 2);
  linear_model_update(m, {{1, 0}, 1, 1.0, {0, 1}}, 0.5);
  CHECK(m.reward[1] == Vector{0.5, 0.0});
  CHECK(m.transition[1] == Matrix::from_rows({{0, 0}, {0.5, 0}}));
  CHECK(m.transition[0] == Matrix(2, 2));
}

TEST_CASE("one-hot features recover a deterministic cycle") {
  std::vector<FeatureTransition> data;
  for (std::size_t s = 0; s < 3; ++s) {
    Vector phi(3, 0.0), next(3, 0.0);
    phi[s] = 1.0;
    next[(s + 1) % 3] = 1.0;
    data.push_back({phi, 0, s == 2 ? 1.0 : 0.0, next});
  }
  const LinearExpectationModel m = train_linear(data, 1, 0.5, 60);
  for (const auto& t : data) {
    const LinearPrediction p = predict_linear(m, t.phi, 0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(p.phi_next[i] == doctest::Approx(t.phi_next[i]).epsilon(1e-9));
    CHECK(p.reward == doctest::Approx(t.reward).epsilon(1e-9));
  }
  const std::vector<std::size_t> actions{0, 0, 0, 0};
  const auto roll = linear_rollout(m, Vector{1, 0, 0}, actions, 4);
  CHECK(roll.size() == 4);
  CHECK(roll[3][1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(roll == linear_rollout(m, Vector{1, 0, 0}, actions, 4));
}

TEST_CASE("rollout needs an action per step") {
  const LinearExpectationModel m = LinearExpectationModel::zeros(1, 2);
  const std::vector<std::size_t> actions{0};
  CHECK_THROWS(linear_rollout(m, Vector{1, 0}, actions, 2));
}

}
