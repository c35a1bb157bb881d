#include <cmath>

#include "deepdyna/agents.hpp"
#include "deepdyna/eval.hpp"
#include "doctest.h"

using namespace deepdyna;

TEST_SUITE("agents") {

TEST_CASE("tabular TD(0) step") {
  TabularValue v{Vector{0.0, 2.0}};
  td0_update_tabular(v, 0, 1.0, 1, 0.5, 0.9, false);
  CHECK(v.values[0] == doctest::Approx(0.5 * (1.0 + 1.8)));
  td0_update_tabular(v, 1, 1.0, 0, 0.5, 0.9, true);
  CHECK(v.values[1] == doctest::Approx(1.5));
}

TEST_CASE("linear TD(0) step") {
  Vector theta{1.0, 0.0};
  td0_update_linear(theta, Vector{1.0, 1.0}, 0.0, Vector{0.0, 1.0}, 0.1, 0.5, false);
  CHECK(theta[0] == doctest::Approx(0.9));
  CHECK(theta[1] == doctest::Approx(-0.1));
}

TEST_CASE("epsilon-greedy") {
  Rng rng(1);
  const Vector q{0.0, 2.0, 2.0, 1.0};
  for (int i = 0; i < 50; ++i) CHECK(epsilon_greedy(q, 0.0, rng) == 1);
  std::vector<int> counts(4, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[epsilon_greedy(q, 1.0, rng)];
  for (int c : counts) CHECK(std::abs(c / double(n) - 0.25) < 0.01);
}

TEST_CASE("SARSA step") {
  LinearQ q = LinearQ::zeros(2, 2);
  q.theta[1] = {1.0, 1.0};
  sarsa_update(q, Vector{1, 0}, 0, 1.0, Vector{0, 1}, 1, 0.5, 0.9, false);
  CHECK(q.theta[0] == Vector{0.5 * 1.9, 0.0});
  CHECK(q.values(Vector{1, 1}) == Vector{0.95, 2.0});
  sarsa_update(q, Vector{1, 0}, 0, 0.0, Vector{0, 1}, 1, 0.5, 0.9, true);
  CHECK(q.theta[0][0] == doctest::Approx(0.475));
}

TEST_CASE("schedule decays to its floors") {
  AgentConfig cfg;
  cfg.epsilon = 0.9;
  cfg.epsilon_decay = 0.5;
  cfg.epsilon_floor = 0.2;
  cfg.alpha_sim = 0.01;
  cfg.alpha_sim_decay = 0.1;
  cfg.alpha_sim_floor = 0.005;
  ExplorationSchedule s(cfg);
  s.end_episode(cfg);
  CHECK(s.epsilon == doctest::Approx(0.45));
  CHECK(s.alpha_sim == doctest::Approx(0.005));
  s.end_episode(cfg);
  s.end_episode(cfg);
  CHECK(s.epsilon == doctest::Approx(0.2));
}

TEST_CASE("oracle world model follows the true dynamics") {
  const TabularMdp env = build_grid_env(2, 2, 1.0, {3}, 0.9);
  Rng rng(2);
  const ObservationMap map = make_synthetic_observations(4, 6, 1, 0.0, rng);
  OracleWorldModel model(env, map);
  const SimulatedStep a = model.simulate(map.canonical(0), kRight, rng);
  CHECK(a.observation == map.canonical(1));
  CHECK_FALSE(a.done);
  const SimulatedStep b = model.simulate(map.canonical(1), kDown, rng);
  CHECK(b.reward == 1.0);
  CHECK(b.done);
}

TEST_CASE("outcome functions") {
  const RewardModel rm{Vector{10.0, -10.0}, 0.0};
  const OutcomeFn f = reward_model_outcome(rm);
  CHECK(f(Vector{1, 0}) == std::pair<double, bool>{1.0, true});
  CHECK(f(Vector{0, 1}) == std::pair<double, bool>{0.0, false});
  CHECK(reward_model_outcome(rm, false)(Vector{1, 0}) == std::pair<double, bool>{1.0, false});

  const TabularMdp env = build_grid_env(1, 3, 1.0, {2}, 0.9);
  Rng rng(3);
  const ObservationMap map = make_synthetic_observations(3, 6, 1, 0.0, rng);
  const OutcomeFn g = nearest_class_outcome(env, map);
  CHECK(g(map.canonical(2)) == std::pair<double, bool>{1.0, true});
  CHECK(g(map.canonical(1)) == std::pair<double, bool>{0.0, false});
}

TEST_CASE("linear world model thresholds termination") {
  LinearExpectationModel m = LinearExpectationModel::zeros(1, 2);
  m.transition[0] = Matrix::identity(2);
  m.reward[0] = {0.7, 0.1};
  Rng rng(4);
  LinearWorldModel lw(m);
  CHECK(lw.simulate(Vector{1, 0}, 0, rng).done);
  CHECK_FALSE(lw.simulate(Vector{0, 1}, 0, rng).done);
  LinearWorldModel never(m, 2.0);
  CHECK_FALSE(never.simulate(Vector{1, 0}, 0, rng).done);
}

TEST_CASE("SARSA learns a short corridor") {
  const TabularMdp env = build_grid_env(3, 1, 1.0, grid_row_states(3, 1, 2), 0.9);
  Rng rng(5);
  const ObservationMap map = make_synthetic_observations(3, 6, 1, 0.0, rng);
  AgentConfig cfg;
  cfg.alpha = 0.1;
  cfg.max_episode_steps = 100;
  const ControlResult r = run_model_free(env, map, cfg, 200, rng);
  CHECK(r.curve.size() == 200);
  CHECK(r.curve.back().cumulative_steps >= 400);
  const auto policy = extract_policy(r.q, {map.canonical(0), map.canonical(1)});
  CHECK(policy == std::vector<std::size_t>{kDown, kDown});
  double late = 0.0;
  for (std::size_t i = 180; i < 200; ++i) late += r.curve[i].discounted_return / 20.0;
  CHECK(late > 0.8);
  CHECK(late <= 0.9 + 1e-12);
}

TEST_CASE("Dyna with the oracle learns the corridor faster") {
  const TabularMdp env = build_grid_env(6, 1, 1.0, grid_row_states(6, 1, 5), 0.9);
  Rng rng(6);
  const ObservationMap map = make_synthetic_observations(6, 6, 1, 0.0, rng);
  AgentConfig cfg;
  cfg.alpha = 0.05;
  cfg.alpha_sim = 0.05;
  cfg.epsilon_decay = 0.95;
  cfg.max_episode_steps = 300;
  OracleWorldModel oracle(env, map);
  std::size_t free_steps = 0, dyna_steps = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng a(seed), b(seed);
    free_steps += run_model_free(env, map, cfg, 30, a).curve.back().cumulative_steps;
    AgentConfig k = cfg;
    k.K = 10;
    dyna_steps += run_dyna(env, map, &oracle, k, 30, b).curve.back().cumulative_steps;
  }
  CHECK(dyna_steps < free_steps);
}

TEST_CASE("tabular policy evaluation on the chain") {
  const TabularMdp env = build_chain_env(5, 0.8, 4, 0.5);
  Rng rng(7);
  const ObservationMap map = make_synthetic_observations(5, 6, 1, 0.0, rng);
  const Vector truth = solve_exact_values(env, uniform_policy(env));
  EvaluationConfig cfg;
  cfg.alpha = 0.01;
  cfg.updates = 50000;
  cfg.checkpoint_every = 10000;
  const EvaluationResult res = evaluate_td(env, map, truth, cfg, {}, nullptr, rng);
  CHECK(res.curve.size() == 5);
  CHECK(res.curve.back().updates == 50000);
  CHECK(value_error(res.estimates, truth) < 0.05);
  CHECK(res.curve.back().value_error < res.curve.front().value_error + 0.05);
}

TEST_CASE("linear policy evaluation on the chain") {
  const TabularMdp env = build_chain_env(5, 0.8, 4, 0.5);
  Rng rng(8);
  const ObservationMap map = make_synthetic_observations(5, 6, 1, 0.0, rng);
  const Vector truth = solve_exact_values(env, uniform_policy(env));
  EvaluationConfig cfg;
  cfg.scheme = ValueScheme::linear;
  cfg.alpha = 0.01;
  cfg.updates = 100000;
  cfg.checkpoint_every = 50000;
  const EvaluationResult res = evaluate_td(env, map, truth, cfg, {}, nullptr, rng);
  CHECK(value_error(res.estimates, truth) < 0.1);
}

TEST_CASE("pooled linear values average over the pool") {
  ObservationMap map;
  map.width = 2;
  map.height = 1;
  map.templates = {{1, 0}, {0, 1}};
  map.pools = {{{1, 0}, {1, 1}}, {{0, 1}}};
  CHECK(pooled_linear_values(Vector{2.0, 4.0}, map) == Vector{4.0, 4.0});
}

}
