#include "deepdyna/agents.hpp"

#include <algorithm>
#include <cmath>

#include "deepdyna/eval.hpp"

namespace deepdyna {

void td0_update_tabular(TabularValue& v, std::size_t s, double r, std::size_t s_next,
                        double alpha, double gamma, bool done) {
  require(s < v.values.size() && s_next < v.values.size(),
          "td0_update_tabular: state id out of range");
  const double target = r + (done ? 0.0 : gamma * v.values[s_next]);
  v.values[s] += alpha * (target - v.values[s]);
}

void td0_update_linear(Vector& theta, std::span<const double> phi, double r,
                       std::span<const double> phi_next, double alpha, double gamma, bool done) {
  require(phi.size() == theta.size() && phi_next.size() == theta.size(),
          "td0_update_linear: dimension mismatch");
  const double target = r + (done ? 0.0 : gamma * dot(theta, phi_next));
  const double delta = target - dot(theta, phi);
  axpy(alpha * delta, phi, theta);
}

std::size_t epsilon_greedy(std::span<const double> q, double epsilon, Rng& rng) {
  require(!q.empty(), "epsilon_greedy: empty action set");
  if (rng.uniform() < epsilon) return rng.uniform_index(q.size());
  return argmax(q);
}

LinearQ LinearQ::zeros(std::size_t n_actions, std::size_t d) {
  require(n_actions > 0 && d > 0, "LinearQ: empty shape");
  return {std::vector<Vector>(n_actions, Vector(d, 0.0))};
}

Vector LinearQ::values(std::span<const double> phi) const {
  Vector q(theta.size());
  for (std::size_t a = 0; a < theta.size(); ++a) q[a] = dot(theta[a], phi);
  return q;
}

void sarsa_update(LinearQ& q, std::span<const double> phi, std::size_t a, double r,
                  std::span<const double> phi_next, std::size_t a_next, double alpha,
                  double gamma, bool done) {
  if (!(a < q.n_actions())) fail("sarsa_update: action " + std::to_string(a) + " out of range");
  if (!(done || a_next < q.n_actions())) fail("sarsa_update: next action " + std::to_string(a_next) + " out of range");
  require(phi.size() == q.feature_size() && phi_next.size() == q.feature_size(),
          "sarsa_update: dimension mismatch");
  const double target = r + (done ? 0.0 : gamma * dot(q.theta[a_next], phi_next));
  const double delta = target - dot(q.theta[a], phi);
  axpy(alpha * delta, phi, q.theta[a]);
}

void AgentConfig::validate() const {
  require(alpha > 0.0, "AgentConfig: alpha must be positive");
  require(alpha_sim > 0.0, "AgentConfig: alpha_sim must be positive");
  require(gamma > 0.0 && gamma < 1.0, "AgentConfig: gamma must lie in (0,1)");
  require(epsilon >= 0.0 && epsilon <= 1.0, "AgentConfig: epsilon must lie in [0,1]");
  require(epsilon_floor >= 0.0 && epsilon_floor <= 1.0,
          "AgentConfig: epsilon floor must lie in [0,1]");
  require(epsilon_decay > 0.0 && epsilon_decay <= 1.0,
          "AgentConfig: epsilon decay must lie in (0,1]");
  require(alpha_sim_decay > 0.0 && alpha_sim_decay <= 1.0,
          "AgentConfig: alpha_sim decay must lie in (0,1]");
  require(max_episode_steps >= 1, "AgentConfig: max_episode_steps must be positive");
}

void ExplorationSchedule::end_episode(const AgentConfig& cfg) {
  epsilon = std::max(cfg.epsilon_floor, epsilon * cfg.epsilon_decay);
  alpha_sim = std::max(cfg.alpha_sim_floor, alpha_sim * cfg.alpha_sim_decay);
}

SimulatedStep OracleWorldModel::simulate(std::span<const double> observation, std::size_t action,
                                         Rng& rng) const {
  const std::size_t s = nearest_class(observation, map_.templates);
  StepResult r = step(env_, s, action, rng);
  return {observe(map_, r.s_next, rng), r.reward, r.done};
}

OutcomeFn reward_model_outcome(const RewardModel& model, bool terminates) {
  return [&model, terminates](std::span<const double> obs) {
    const double r = model.emit(obs);
    return std::pair<double, bool>{r, terminates && r > 0.5};
  };
}

OutcomeFn nearest_class_outcome(const TabularMdp& env, const ObservationMap& map) {
  return [&env, &map](std::span<const double> obs) {
    const std::size_t s = nearest_class(obs, map.templates);
    return std::pair<double, bool>{env.rewards[s], env.is_terminal(s)};
  };
}

GenerativeWorldModel::GenerativeWorldModel(const DbnStack& stack, const TemporalModelSet& models,
                                           std::size_t n_actions, OutcomeFn outcome)
    : stack_(stack), models_(models), n_actions_(n_actions), outcome_(std::move(outcome)) {
  for (std::size_t a = 0; a < n_actions_; ++a)
    if (!(models_.has_action(a))) fail("GenerativeWorldModel: missing temporal model for action " + std::to_string(a));
}

SimulatedStep GenerativeWorldModel::simulate(std::span<const double> observation,
                                             std::size_t action, Rng& rng) const {
  Vector next = predict_next_observation(stack_, models_.for_action(action), observation, rng);
  auto [reward, done] = outcome_(next);
  return {std::move(next), reward, done};
}

SimulatedStep LinearWorldModel::simulate(std::span<const double> observation, std::size_t action,
                                         Rng&) const {
  LinearPrediction p = predict_linear(model_, observation, action);
  const bool done = p.reward >= done_threshold_;
  return {std::move(p.phi_next), p.reward, done};
}

ControlResult run_model_free(const TabularMdp& env, const ObservationMap& map,
                             const AgentConfig& cfg, std::size_t episodes, Rng& rng) {
  return run_dyna(env, map, nullptr, cfg, episodes, rng);
}

namespace {

void simulate_rollout(const WorldModel& model, LinearQ& q, std::span<const double> root,
                      std::size_t K, double epsilon, double alpha, double gamma, Rng& rng) {
  Vector x(root.begin(), root.end());
  std::size_t a = epsilon_greedy(q.values(x), epsilon, rng);
  for (std::size_t k = 0; k < K; ++k) {
    SimulatedStep sim = model.simulate(x, a, rng);
    if (sim.done) {
      sarsa_update(q, x, a, sim.reward, sim.observation, 0, alpha, gamma, true);
      x.assign(root.begin(), root.end());
      a = epsilon_greedy(q.values(x), epsilon, rng);
      continue;
    }
    std::size_t a_next = epsilon_greedy(q.values(sim.observation), epsilon, rng);
    sarsa_update(q, x, a, sim.reward, sim.observation, a_next, alpha, gamma, false);
    x = std::move(sim.observation);
    a = a_next;
  }
}

}  // namespace

ControlResult run_dyna(const TabularMdp& env, const ObservationMap& map, const WorldModel* model,
                       const AgentConfig& cfg, std::size_t episodes, Rng& rng) {
  cfg.validate();
  require(map.n_states() == env.n_states, "run_dyna: observation map does not match the env");
  if (model != nullptr)
    require(model->n_actions() >= env.n_actions(),
            "run_dyna: world model does not cover every environment action");

  ControlResult result{LinearQ::zeros(env.n_actions(), map.dim()), {}};
  LinearQ& q = result.q;
  ExplorationSchedule schedule(cfg);
  std::size_t total_steps = 0;

  for (std::size_t ep = 0; ep < episodes; ++ep) {
    EpisodeRecord rec;
    rec.episode = ep + 1;
    rec.epsilon = schedule.epsilon;
    rec.alpha_sim = schedule.alpha_sim;

    std::size_t s = env.start_state;
    Vector obs = observe(map, s, rng);
    std::size_t a = epsilon_greedy(q.values(obs), schedule.epsilon, rng);
    double discount = 1.0;
    for (std::size_t t = 0; t < cfg.max_episode_steps; ++t) {
      StepResult r = step(env, s, a, rng);
      Vector obs_next = observe(map, r.s_next, rng);
      ++rec.steps;
      rec.undiscounted_return += r.reward;
      rec.discounted_return += discount * r.reward;
      discount *= cfg.gamma;

      std::size_t a_next = 0;
      if (!r.done) a_next = epsilon_greedy(q.values(obs_next), schedule.epsilon, rng);
      sarsa_update(q, obs, a, r.reward, obs_next, a_next, cfg.alpha, cfg.gamma, r.done);

      if (model != nullptr && cfg.K > 0)
        simulate_rollout(*model, q, obs, cfg.K, schedule.epsilon, schedule.alpha_sim, cfg.gamma,
                         rng);

      if (r.done) break;
      s = r.s_next;
      obs = std::move(obs_next);
      a = a_next;
    }
    total_steps += rec.steps;
    rec.cumulative_steps = total_steps;
    result.curve.push_back(rec);
    schedule.end_episode(cfg);
  }
  return result;
}

std::vector<std::size_t> extract_policy(const LinearQ& q,
                                        const std::vector<Vector>& state_features) {
  std::vector<std::size_t> policy;
  policy.reserve(state_features.size());
  for (const auto& phi : state_features) policy.push_back(argmax(q.values(phi)));
  return policy;
}

Vector pooled_linear_values(const Vector& theta, const ObservationMap& map) {
  Vector v(map.n_states());
  for (std::size_t s = 0; s < map.n_states(); ++s) {
    double total = 0.0;
    for (const auto& x : map.pools[s]) total += dot(theta, x);
    v[s] = total / static_cast<double>(map.pools[s].size());
  }
  return v;
}

EvaluationResult evaluate_td(const TabularMdp& env, const ObservationMap& map,
                             const Vector& true_values, const EvaluationConfig& cfg,
                             const StateLabeler& labeler, const WorldModel* model, Rng& rng) {
  require(env.n_actions() == 1, "evaluate_td: expects a single-action environment");
  require(true_values.size() == env.n_states, "evaluate_td: true values have the wrong length");
  require(cfg.checkpoint_every >= 1, "evaluate_td: checkpoint interval must be positive");
  const bool tabular = cfg.scheme == ValueScheme::tabular;

  TabularValue table{Vector(env.n_states, 0.0)};
  Vector theta(map.dim(), 0.0);
  auto label_sim = [&](std::span<const double> obs) {
    return labeler ? labeler(obs) : nearest_class(obs, map.templates);
  };
  auto estimates = [&]() { return tabular ? table.values : pooled_linear_values(theta, map); };

  EvaluationResult result;
  std::size_t s = env.start_state;
  Vector obs = observe(map, s, rng);
  for (std::size_t t = 1; t <= cfg.updates; ++t) {
    StepResult r = step(env, s, 0, rng);
    Vector obs_next = observe(map, r.s_next, rng);
    if (tabular) {
      std::size_t i = labeler ? labeler(obs) : s;
      std::size_t j = labeler ? labeler(obs_next) : r.s_next;
      td0_update_tabular(table, i, r.reward, j, cfg.alpha, env.gamma, r.done);
    } else {
      td0_update_linear(theta, obs, r.reward, obs_next, cfg.alpha, env.gamma, r.done);
    }

    if (model != nullptr && cfg.K > 0) {
      Vector x = obs;
      for (std::size_t k = 0; k < cfg.K; ++k) {
        SimulatedStep sim = model->simulate(x, 0, rng);
        if (tabular)
          td0_update_tabular(table, label_sim(x), sim.reward, label_sim(sim.observation),
                             cfg.alpha_sim, env.gamma, sim.done);
        else
          td0_update_linear(theta, x, sim.reward, sim.observation, cfg.alpha_sim, env.gamma,
                            sim.done);
        if (sim.done) break;
        x = std::move(sim.observation);
      }
    }

    if (r.done) {
      s = env.start_state;
      obs = observe(map, s, rng);
    } else {
      s = r.s_next;
      obs = std::move(obs_next);
    }
    if (t % cfg.checkpoint_every == 0 || t == cfg.updates)
      result.curve.push_back({t, value_error(estimates(), true_values)});
  }
  result.estimates = estimates();
  return result;
}

}  // namespace deepdyna
