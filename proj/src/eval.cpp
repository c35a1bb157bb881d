#include "deepdyna/eval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace deepdyna {

Vector solve_exact_values(const TabularMdp& env, const Matrix& policy) {
  env.validate();
  const Matrix P = policy_kernel(env, policy);
  const std::size_t n = env.n_states;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < n; ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    if (env.is_terminal(s)) continue;  // row stays V(s) = 0
    for (std::size_t t = 0; t < n; ++t) {
      const double p = P(s, t);
      if (p == 0.0) continue;
      b(i) += p * env.rewards[t];
      if (!env.is_terminal(t)) A(i, static_cast<Eigen::Index>(t)) -= env.gamma * p;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw std::runtime_error("solve_exact_values: singular Bellman system");
  Eigen::VectorXd v = lu.solve(b);
  return Vector(v.data(), v.data() + v.size());
}

double action_value(const TabularMdp& env, const Vector& values, std::size_t s, std::size_t a) {
  double q = 0.0;
  auto row = env.transitions[a].row(s);
  for (std::size_t t = 0; t < env.n_states; ++t) {
    if (row[t] == 0.0) continue;
    q += row[t] * (env.rewards[t] + (env.is_terminal(t) ? 0.0 : env.gamma * values[t]));
  }
  return q;
}

OptimalSolution solve_optimal(const TabularMdp& env, double tol) {
  env.validate();
  require(tol > 0.0, "solve_optimal: tolerance must be positive");
  const std::size_t n = env.n_states;
  // Iterating to this residual keeps the greedy policy's value within tol of V*.
  const double stop = tol * (1.0 - env.gamma) / (2.0 * env.gamma);
  OptimalSolution sol;
  sol.values.assign(n, 0.0);
  for (;;) {
    ++sol.iterations;
    Vector next(n, 0.0);
    double residual = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (env.is_terminal(s)) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < env.n_actions(); ++a)
        best = std::max(best, action_value(env, sol.values, s, a));
      next[s] = best;
      residual = std::max(residual, std::abs(best - sol.values[s]));
    }
    sol.values = std::move(next);
    if (residual <= stop) break;
  }
  sol.policy.assign(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (env.is_terminal(s)) continue;
    Vector q(env.n_actions());
    for (std::size_t a = 0; a < env.n_actions(); ++a) q[a] = action_value(env, sol.values, s, a);
    const double best = *std::max_element(q.begin(), q.end());
    for (std::size_t a = 0; a < q.size(); ++a)
      if (q[a] >= best - 1e-12) {
        sol.policy[s] = a;
        break;
      }
  }
  return sol;
}

Matrix deterministic_policy(const TabularMdp& env, std::span<const std::size_t> actions) {
  require(actions.size() == env.n_states, "deterministic_policy: one action per state required");
  Matrix pi(env.n_states, env.n_actions());
  for (std::size_t s = 0; s < env.n_states; ++s) {
    require(actions[s] < env.n_actions(), "deterministic_policy: action out of range");
    pi(s, actions[s]) = 1.0;
  }
  return pi;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), "total_variation: length mismatch");
  auto check = [](std::span<const double> d) {
    double s = 0.0;
    for (double x : d) {
      require(x >= -1e-12, "total_variation: negative probability");
      s += x;
    }
    require(std::abs(s - 1.0) <= 1e-9, "total_variation: input does not sum to 1");
  };
  check(p);
  check(q);
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * tv);
}

std::size_t nearest_class(std::span<const double> decoded, const std::vector<Vector>& templates) {
  require(!templates.empty(), "nearest_class: no templates");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < templates.size(); ++c) {
    require(templates[c].size() == decoded.size(), "nearest_class: dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < decoded.size(); ++i) {
      double diff = decoded[i] - templates[c][i];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

NextObservationSampler generative_sampler(const DbnStack& stack, const TemporalModelSet& models) {
  return [&stack, &models](std::span<const double> obs, std::size_t action, Rng& rng) {
    return predict_next_observation(stack, models.for_action(action), obs, rng);
  };
}

std::vector<std::size_t> non_terminal_states(const TabularMdp& env) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < env.n_states; ++s)
    if (!env.is_terminal(s)) out.push_back(s);
  return out;
}

KernelEstimate empirical_kernel(const NextObservationSampler& sampler, const ObservationMap& map,
                                const TabularMdp& env, std::span<const std::size_t> actions,
                                std::size_t samples_per_state, Rng& rng) {
  require(samples_per_state >= 1, "empirical_kernel: need at least one sample per state");
  require(map.n_states() == env.n_states, "empirical_kernel: observation map size mismatch");
  const std::size_t n = env.n_states;
  KernelEstimate est;
  est.frequencies.assign(env.n_actions(), Matrix(n, n));
  est.counts.assign(env.n_actions(), std::vector<std::size_t>(n, 0));
  for (std::size_t a : actions) {
    require(a < env.n_actions(), "empirical_kernel: action out of range");
    for (std::size_t s : non_terminal_states(env)) {
      for (std::size_t k = 0; k < samples_per_state; ++k) {
        Vector next = sampler(map.canonical(s), a, rng);
        est.frequencies[a](s, nearest_class(next, map.templates)) += 1.0;
      }
      est.counts[a][s] = samples_per_state;
      for (double& f : est.frequencies[a].row(s)) f /= static_cast<double>(samples_per_state);
    }
  }
  return est;
}

KernelEstimate empirical_kernel(const DbnStack& stack, const TemporalModelSet& models,
                                const ObservationMap& map, const TabularMdp& env,
                                std::size_t samples_per_state, Rng& rng) {
  std::vector<std::size_t> actions(env.n_actions());
  for (std::size_t a = 0; a < actions.size(); ++a) actions[a] = a;
  return empirical_kernel(generative_sampler(stack, models), map, env, actions,
                          samples_per_state, rng);
}

double mean_row_tv(const Matrix& estimate, const Matrix& truth, std::span<const std::size_t> rows) {
  require(estimate.rows() == truth.rows() && estimate.cols() == truth.cols(),
          "mean_row_tv: shape mismatch");
  require(!rows.empty(), "mean_row_tv: no rows");
  double total = 0.0;
  for (std::size_t s : rows) total += total_variation(estimate.row(s), truth.row(s));
  return total / static_cast<double>(rows.size());
}

double kernel_tv(const KernelEstimate& estimate, const TabularMdp& env,
                 std::span<const std::size_t> actions) {
  require(estimate.frequencies.size() == env.n_actions(), "kernel_tv: action count mismatch");
  std::vector<std::size_t> all;
  if (actions.empty()) {
    for (std::size_t a = 0; a < env.n_actions(); ++a) all.push_back(a);
    actions = all;
  }
  const auto rows = non_terminal_states(env);
  double total = 0.0;
  for (std::size_t a : actions) {
    require(a < env.n_actions(), "kernel_tv: action out of range");
    require(estimate.frequencies[a].rows() == env.n_states, "kernel_tv: state count mismatch");
    for (std::size_t s : rows)
      if (!(estimate.counts[a][s] > 0)) fail("kernel_tv: missing samples for state " +
                                             std::to_string(s) + ", action " + std::to_string(a));
    total += mean_row_tv(estimate.frequencies[a], env.transitions[a], rows);
  }
  return total / static_cast<double>(actions.size());
}

Matrix matrix_power(const Matrix& m, std::size_t k) {
  require(m.rows() == m.cols(), "matrix_power: matrix must be square");
  Matrix result = Matrix::identity(m.rows());
  for (std::size_t i = 0; i < k; ++i) result = matmul(result, m);
  return result;
}

std::vector<double> kstep_tv(const NextObservationSampler& sampler, const TabularMdp& env,
                             const ObservationMap& map, std::size_t k_max,
                             std::size_t trajectories, Rng& rng) {
  require(k_max >= 1, "kstep_tv: k_max must be at least 1");
  require(trajectories >= 1, "kstep_tv: need at least one trajectory per root");
  const std::size_t n = env.n_states;
  const Matrix kernel = policy_kernel(env, uniform_policy(env));
  const auto roots = non_terminal_states(env);

  // counts[k] is an n × n matrix of (root, decoded class) frequencies.
  std::vector<Matrix> counts(k_max + 1, Matrix(n, n));
  for (std::size_t root : roots) {
    for (std::size_t t = 0; t < trajectories; ++t) {
      Vector obs = map.canonical(root);
      counts[0](root, nearest_class(obs, map.templates)) += 1.0;
      for (std::size_t k = 1; k <= k_max; ++k) {
        std::size_t a = env.n_actions() == 1 ? 0 : rng.uniform_index(env.n_actions());
        obs = sampler(obs, a, rng);
        counts[k](root, nearest_class(obs, map.templates)) += 1.0;
      }
    }
  }

  std::vector<double> tv(k_max + 1);
  Matrix power = Matrix::identity(n);
  for (std::size_t k = 0; k <= k_max; ++k) {
    for (double& c : counts[k].entries()) c /= static_cast<double>(trajectories);
    tv[k] = mean_row_tv(counts[k], power, roots);
    power = matmul(power, kernel);
  }
  return tv;
}

NextObservationSampler linear_sampler(const LinearExpectationModel& model) {
  return [&model](std::span<const double> obs, std::size_t a, Rng&) {
    return predict_linear(model, obs, a).phi_next;
  };
}

RolloutScore rollout_accuracy(const NextObservationSampler& sampler, const TabularMdp& env,
                              const ObservationMap& map, std::size_t K,
                              std::size_t rollouts_per_root, Rng& rng) {
  const auto& templates = map.templates;
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < templates.size(); ++i)
    for (std::size_t j = i + 1; j < templates.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t p = 0; p < templates[i].size(); ++p)
        d2 += (templates[i][p] - templates[j][p]) * (templates[i][p] - templates[j][p]);
      min_dist = std::min(min_dist, std::sqrt(d2));
    }
  const double radius = 0.5 * min_dist;

  RolloutScore score;
  for (std::size_t root : non_terminal_states(env)) {
    for (std::size_t r = 0; r < rollouts_per_root; ++r) {
      Vector obs = map.canonical(root);
      std::size_t prev = root;
      for (std::size_t k = 0; k < K; ++k) {
        const std::size_t a = env.n_actions() == 1 ? 0 : rng.uniform_index(env.n_actions());
        obs = sampler(obs, a, rng);
        const std::size_t c = nearest_class(obs, templates);
        double d2 = 0.0;
        for (std::size_t p = 0; p < obs.size(); ++p)
          d2 += (obs[p] - templates[c][p]) * (obs[p] - templates[c][p]);
        ++score.total;
        if (env.transitions[a](prev, c) > 0.0 && std::sqrt(d2) < radius) ++score.correct;
        prev = c;
        if (env.is_terminal(c)) break;
      }
    }
  }
  return score;
}

double value_error(std::span<const double> estimates, std::span<const double> truth) {
  require(estimates.size() == truth.size(), "value_error: length mismatch");
  require(!truth.empty(), "value_error: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) total += std::abs(estimates[i] - truth[i]);
  return total / static_cast<double>(truth.size());
}

Curve average_curves(const std::vector<Curve>& curves) {
  require(!curves.empty(), "average_curves: no curves");
  const std::size_t len = curves.front().size();
  for (const auto& c : curves) require(c.size() == len, "average_curves: curves differ in length");
  const double n = static_cast<double>(curves.size());
  Curve out(len);
  for (std::size_t i = 0; i < len; ++i) {
    double mean = 0.0;
    for (const auto& c : curves) mean += c[i].y;
    mean /= n;
    double var = 0.0;
    for (const auto& c : curves) var += (c[i].y - mean) * (c[i].y - mean);
    const double sd = curves.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    out[i] = {curves.front()[i].x, mean, sd / std::sqrt(n)};
  }
  return out;
}

Curve resample_curve(const Curve& curve, std::span<const double> grid, double before) {
  Curve out;
  out.reserve(grid.size());
  std::size_t j = 0;
  double current = before;
  for (double g : grid) {
    while (j < curve.size() && curve[j].x <= g) current = curve[j++].y;
    out.push_back({g, current, 0.0});
  }
  return out;
}

std::optional<double> first_crossing(const Curve& curve, double threshold, std::size_t window) {
  require(window >= 1, "first_crossing: window must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    acc += curve[i].y;
    if (i >= window) acc -= curve[i - window].y;
    if (i + 1 >= window && acc / static_cast<double>(window) >= threshold) return curve[i].x;
  }
  return std::nullopt;
}

}  // namespace deepdyna
