#include "deepdyna/envs.hpp"

#include <algorithm>
#include <cmath>

namespace deepdyna {

void TabularMdp::validate() const {
  require(n_states >= 1, "TabularMdp: no states");
  require(!transitions.empty(), "TabularMdp: no actions");
  require(rewards.size() == n_states && terminal.size() == n_states,
          "TabularMdp: reward/terminal vectors do not match the state count");
  require(gamma > 0.0 && gamma < 1.0, "TabularMdp: discount must lie in (0,1)");
  require(start_state < n_states, "TabularMdp: start state out of range");
  for (std::size_t a = 0; a < transitions.size(); ++a) {
    const Matrix& P = transitions[a];
    if (!(P.rows() == n_states && P.cols() == n_states)) fail("TabularMdp: transition matrix for action " + std::to_string(a) + " has wrong shape");
    for (std::size_t s = 0; s < n_states; ++s) {
      double row_sum = 0.0;
      for (double p : P.row(s)) {
        require(p >= 0.0, "TabularMdp: negative transition probability");
        row_sum += p;
      }
      if (!(std::abs(row_sum - 1.0) <= 1e-12)) fail("TabularMdp: row " + std::to_string(s) + " of action " + std::to_string(a) +
                  " does not sum to 1");
    }
  }
}

TabularMdp build_chain_env(std::size_t n_states, double p_advance, std::size_t reward_state,
                           double gamma) {
  require(n_states >= 2, "build_chain_env: need at least two states");
  require(p_advance > 0.0 && p_advance <= 1.0, "build_chain_env: p_advance must lie in (0,1]");
  require(reward_state < n_states, "build_chain_env: reward state out of range");
  TabularMdp env;
  env.n_states = n_states;
  Matrix P(n_states, n_states);
  for (std::size_t s = 0; s < n_states; ++s) {
    P(s, (s + 1) % n_states) += p_advance;
    P(s, s) += 1.0 - p_advance;
  }
  env.transitions = {P};
  env.rewards.assign(n_states, 0.0);
  env.rewards[reward_state] = 1.0;
  env.gamma = gamma;
  env.start_state = 0;
  env.terminal.assign(n_states, false);
  env.validate();
  return env;
}

TabularMdp build_grid_env(std::size_t rows, std::size_t cols, double p_success,
                          const std::set<std::size_t>& reward_states, double gamma) {
  require(rows * cols >= 2, "build_grid_env: need at least two cells");
  require(p_success > 0.0 && p_success <= 1.0, "build_grid_env: p_success must lie in (0,1]");
  const std::size_t n = rows * cols;
  TabularMdp env;
  env.n_states = n;
  env.start_state = 0;
  require(!reward_states.contains(env.start_state),
          "build_grid_env: reward state equals the start state");
  env.rewards.assign(n, 0.0);
  env.terminal.assign(n, false);
  for (std::size_t s : reward_states) {
    require(s < n, "build_grid_env: reward state out of range");
    env.rewards[s] = 1.0;
    env.terminal[s] = true;
  }
  env.gamma = gamma;

  for (std::size_t a = 0; a < 4; ++a) {
    Matrix P(n, n);
    for (std::size_t s = 0; s < n; ++s) {
      if (env.terminal[s]) {
        P(s, s) = 1.0;
        continue;
      }
      const std::size_t r = s / cols, c = s % cols;
      bool on_map = true;
      std::size_t target = s;
      switch (a) {
        case kUp: on_map = r > 0; if (on_map) target = s - cols; break;
        case kDown: on_map = r + 1 < rows; if (on_map) target = s + cols; break;
        case kLeft: on_map = c > 0; if (on_map) target = s - 1; break;
        case kRight: on_map = c + 1 < cols; if (on_map) target = s + 1; break;
      }
      if (!on_map) {
        P(s, s) = 1.0;
      } else {
        P(s, target) += p_success;
        P(s, s) += 1.0 - p_success;
      }
    }
    env.transitions.push_back(std::move(P));
  }
  env.validate();
  return env;
}

std::set<std::size_t> grid_row_states(std::size_t rows, std::size_t cols, std::size_t row) {
  require(row < rows, "grid_row_states: row out of range");
  std::set<std::size_t> out;
  for (std::size_t c = 0; c < cols; ++c) out.insert(row * cols + c);
  return out;
}

StepResult step(const TabularMdp& env, std::size_t s, std::size_t a, Rng& rng) {
  if (!(s < env.n_states)) fail("step: state " + std::to_string(s) + " out of range");
  if (!(a < env.n_actions())) fail("step: action " + std::to_string(a) + " out of range");
  if (env.is_terminal(s)) return {s, 0.0, true};
  std::size_t next = sample_categorical(env.transitions[a].row(s), rng);
  return {next, env.rewards[next], env.is_terminal(next)};
}

Matrix policy_kernel(const TabularMdp& env, const Matrix& policy) {
  require(policy.rows() == env.n_states && policy.cols() == env.n_actions(),
          "policy_kernel: policy shape does not match the environment");
  Matrix K(env.n_states, env.n_states);
  for (std::size_t s = 0; s < env.n_states; ++s)
    for (std::size_t a = 0; a < env.n_actions(); ++a)
      if (policy(s, a) != 0.0) axpy(policy(s, a), env.transitions[a].row(s), K.row(s));
  return K;
}

Matrix uniform_policy(const TabularMdp& env) {
  return Matrix(env.n_states, env.n_actions(), 1.0 / static_cast<double>(env.n_actions()));
}

void ObservationMap::validate() const {
  require(!pools.empty(), "ObservationMap: no states");
  require(templates.size() == pools.size(), "ObservationMap: one template per state required");
  for (std::size_t s = 0; s < pools.size(); ++s) {
    if (!(!pools[s].empty())) fail("ObservationMap: empty pool for state " + std::to_string(s));
    require(templates[s].size() == dim(), "ObservationMap: template size mismatch");
    for (const auto& img : pools[s])
      if (!(img.size() == dim())) fail("ObservationMap: image size mismatch in pool " +
                                       std::to_string(s));
  }
}

Vector observe(const ObservationMap& map, std::size_t s, Rng& rng) {
  if (!(s < map.n_states())) fail("observe: state " + std::to_string(s) + " out of range");
  const auto& pool = map.pools[s];
  if (pool.size() == 1) return pool.front();
  return pool[rng.uniform_index(pool.size())];
}

namespace {

// One-pixel-wide bars: every row, every column, and the diagonals and
// anti-diagonals whose offset from the main one is at most side/2.
std::vector<Vector> oriented_bars(std::size_t side) {
  const auto n = static_cast<std::ptrdiff_t>(side);
  std::vector<Vector> bars;
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    Vector v(side * side, 0.0);
    for (std::ptrdiff_t x = 0; x < n; ++x) v[r * n + x] = 1.0;
    bars.push_back(std::move(v));
  }
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    Vector v(side * side, 0.0);
    for (std::ptrdiff_t y = 0; y < n; ++y) v[y * n + c] = 1.0;
    bars.push_back(std::move(v));
  }
  for (int dir = 0; dir < 2; ++dir)
    for (std::ptrdiff_t o = -n / 2; o <= n / 2; ++o) {
      Vector v(side * side, 0.0);
      for (std::ptrdiff_t y = 0; y < n; ++y) {
        std::ptrdiff_t x = (dir == 0 ? y : n - 1 - y) + o;
        if (x >= 0 && x < n) v[y * n + x] = 1.0;
      }
      bars.push_back(std::move(v));
    }
  return bars;
}

std::size_t hamming(const Vector& a, const Vector& b) {
  std::size_t d = 0;
  for (std::size_t p = 0; p < a.size(); ++p) d += a[p] != b[p];
  return d;
}

}  // namespace

ObservationMap make_synthetic_observations(std::size_t n_classes, std::size_t image_side,
                                           std::size_t variants_per_class, double noise,
                                           Rng& rng) {
  require(image_side >= 4, "make_synthetic_observations: image_side must be at least 4");
  require(n_classes >= 1, "make_synthetic_observations: need at least one class");
  require(variants_per_class >= 1, "make_synthetic_observations: need at least one variant");
  require(noise >= 0.0 && noise <= 1.0, "make_synthetic_observations: noise outside [0,1]");

  ObservationMap map;
  map.width = map.height = image_side;
  map.pixel_family = VisibleFamily::binary;

  // Glyphs are drawn on a base grid of side at most 8 (when halving allows)
  // and upscaled by pixel blocks, which scales every distance alike.
  std::size_t base = image_side;
  while (base > 8 && base % 2 == 0) base /= 2;
  const std::size_t scale = image_side / base;
  const std::size_t d = base * base;
  const std::size_t min_diff = (d + 3) / 4;

  // Unions of two bars, then of three, in a fixed order, kept greedily when
  // far enough from every glyph accepted so far and, until the pixel count
  // is reached, linearly independent of them.
  const std::vector<Vector> bars = oriented_bars(base);
  const std::size_t nb = bars.size();
  std::vector<Vector> glyphs;
  std::vector<Vector> basis;  // orthonormal span of the accepted glyphs
  auto residual = [&](Vector r) {
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& q : basis) {
        const double c = dot(q, r);
        for (std::size_t p = 0; p < d; ++p) r[p] -= c * q[p];
      }
    return r;
  };
  auto consider = [&](std::initializer_list<std::size_t> parts) {
    Vector glyph(d, 0.0);
    for (std::size_t b : parts)
      for (std::size_t p = 0; p < d; ++p) glyph[p] = std::max(glyph[p], bars[b][p]);
    if (!std::all_of(glyphs.begin(), glyphs.end(),
                     [&](const Vector& t) { return hamming(t, glyph) >= min_diff; }))
      return;
    if (glyphs.size() < d) {
      Vector r = residual(glyph);
      const double norm = std::sqrt(dot(r, r));
      if (norm < 1e-6) return;
      for (double& x : r) x /= norm;
      basis.push_back(std::move(r));
    }
    glyphs.push_back(std::move(glyph));
  };
  for (std::size_t i = 0; i < nb && glyphs.size() < n_classes; ++i)
    for (std::size_t j = i + 1; j < nb && glyphs.size() < n_classes; ++j) consider({i, j});
  for (std::size_t i = 0; i < nb && glyphs.size() < n_classes; ++i)
    for (std::size_t j = i + 1; j < nb && glyphs.size() < n_classes; ++j)
      for (std::size_t k = j + 1; k < nb && glyphs.size() < n_classes; ++k) consider({i, j, k});
  if (glyphs.size() < n_classes)
    fail("make_synthetic_observations: too many classes (" + std::to_string(n_classes) +
         ") for distinct templates at side " + std::to_string(image_side));

  for (const Vector& g : glyphs) {
    Vector t(image_side * image_side);
    for (std::size_t y = 0; y < image_side; ++y)
      for (std::size_t x = 0; x < image_side; ++x) t[y * image_side + x] = g[(y / scale) * base + x / scale];
    map.templates.push_back(std::move(t));
  }

  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<Vector> pool;
    if (noise == 0.0 && variants_per_class == 1) {
      pool.push_back(map.templates[c]);
    } else {
      for (std::size_t v = 0; v < variants_per_class; ++v) {
        Vector img = map.templates[c];
        for (double& px : img)
          if (bernoulli(noise, rng)) px = 1.0 - px;
        pool.push_back(std::move(img));
      }
    }
    map.pools.push_back(std::move(pool));
  }
  return map;
}

std::vector<Transition> collect_transitions(const TabularMdp& env, const ObservationMap& map,
                                            const StatePolicy& policy, std::size_t n_steps,
                                            Rng& rng) {
  require(n_steps >= 1, "collect_transitions: n_steps must be at least 1");
  require(map.n_states() == env.n_states,
          "collect_transitions: observation map does not cover the environment");
  std::vector<Transition> out;
  out.reserve(n_steps);
  std::size_t s = env.start_state;
  Vector obs = observe(map, s, rng);
  for (std::size_t t = 0; t < n_steps; ++t) {
    std::size_t a = policy ? policy(s, rng) : rng.uniform_index(env.n_actions());
    StepResult r = step(env, s, a, rng);
    Vector obs_next = observe(map, r.s_next, rng);
    out.push_back({s, obs, a, r.reward, r.s_next, obs_next, r.done});
    if (r.done) {
      s = env.start_state;
      obs = observe(map, s, rng);
    } else {
      s = r.s_next;
      obs = std::move(obs_next);
    }
  }
  return out;
}

double RewardModel::probability(std::span<const double> x) const {
  if (!(x.size() == weights.size())) fail("RewardModel: input has length " +
                                          std::to_string(x.size()) + ", expected " +
                                          std::to_string(weights.size()));
  return sigmoid(dot(weights, x) + bias);
}

LogisticGradient logistic_loss_and_gradient(const RewardModel& model,
                                            const std::vector<Vector>& observations,
                                            const std::vector<double>& rewards) {
  require(!observations.empty(), "logistic_loss_and_gradient: empty data");
  require(observations.size() == rewards.size(), "logistic_loss_and_gradient: length mismatch");
  LogisticGradient g;
  g.weights.assign(model.weights.size(), 0.0);
  for (std::size_t n = 0; n < observations.size(); ++n) {
    const double z = dot(model.weights, observations[n]) + model.bias;
    const double p = sigmoid(z);
    // −[y log p + (1−y) log(1−p)] written with softplus for stability.
    g.loss += softplus(z) - rewards[n] * z;
    const double err = p - rewards[n];
    axpy(err, observations[n], g.weights);
    g.bias += err;
  }
  const double inv = 1.0 / static_cast<double>(observations.size());
  g.loss *= inv;
  for (double& w : g.weights) w *= inv;
  g.bias *= inv;
  return g;
}

RewardModel train_reward_model(const std::vector<Vector>& observations,
                               const std::vector<double>& rewards, double lr,
                               std::size_t iterations) {
  require(!observations.empty(), "train_reward_model: empty data");
  require(observations.size() == rewards.size(), "train_reward_model: length mismatch");
  for (double r : rewards)
    require(r == 0.0 || r == 1.0, "train_reward_model: rewards must be 0 or 1");
  const std::size_t d = observations.front().size();
  for (const auto& x : observations)
    require(x.size() == d, "train_reward_model: inconsistent observation lengths");

  RewardModel model{Vector(d, 0.0), 0.0};
  for (std::size_t it = 0; it < iterations; ++it) {
    LogisticGradient g = logistic_loss_and_gradient(model, observations, rewards);
    axpy(-lr, g.weights, model.weights);
    model.bias -= lr * g.bias;
  }
  return model;
}

}  // namespace deepdyna
