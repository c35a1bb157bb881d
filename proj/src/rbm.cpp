#include "deepdyna/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace deepdyna {

namespace {

void check_visible(const RbmParams& rbm, std::span<const double> v, const char* op) {
  if (!(v.size() == rbm.n_visible())) fail(std::string(op) + ": visible vector has length " +
                                           std::to_string(v.size()) + ", expected " +
                                           std::to_string(rbm.n_visible()));
}

void check_hidden(const RbmParams& rbm, std::span<const double> h, const char* op) {
  if (!(h.size() == rbm.n_hidden())) fail(std::string(op) + ": hidden vector has length " +
                                          std::to_string(h.size()) + ", expected " +
                                          std::to_string(rbm.n_hidden()));
}

double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

RbmParams RbmParams::zeros(std::size_t n_visible, std::size_t n_hidden, VisibleFamily family) {
  RbmParams p;
  p.weights = Matrix(n_visible, n_hidden);
  p.v_bias.assign(n_visible, 0.0);
  p.h_bias.assign(n_hidden, 0.0);
  p.family = family;
  return p;
}

RbmParams RbmParams::random(std::size_t n_visible, std::size_t n_hidden, Rng& rng,
                            double stddev, VisibleFamily family) {
  RbmParams p = zeros(n_visible, n_hidden, family);
  for (double& w : p.weights.entries()) w = gaussian(0.0, stddev, rng);
  return p;
}

void RbmParams::validate() const {
  require(n_visible() > 0, "RbmParams: no visible units");
  require(n_hidden() > 0, "RbmParams: no hidden units");
  require(weights.rows() == n_visible() && weights.cols() == n_hidden(),
          "RbmParams: weight matrix shape does not match bias lengths");
}

void CdConfig::validate() const {
  require(k >= 1, "CdConfig: k must be at least 1");
  require(minibatch_size >= 1, "CdConfig: minibatch_size must be at least 1");
  require(learning_rate >= 0.0, "CdConfig: negative learning rate");
  require(momentum >= 0.0 && momentum < 1.0, "CdConfig: momentum must lie in [0,1)");
}

RbmVelocity RbmVelocity::zeros_like(const RbmParams& rbm) {
  return {Matrix(rbm.n_visible(), rbm.n_hidden()), Vector(rbm.n_visible(), 0.0),
          Vector(rbm.n_hidden(), 0.0)};
}

Vector prop_up(const RbmParams& rbm, std::span<const double> v) {
  check_visible(rbm, v, "prop_up");
  Vector h = matvec_transposed(rbm.weights, v);
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = sigmoid(h[j] + rbm.h_bias[j]);
  return h;
}

Vector prop_down(const RbmParams& rbm, std::span<const double> h) {
  check_hidden(rbm, h, "prop_down");
  Vector v = matvec(rbm.weights, h);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] += rbm.v_bias[i];
    if (rbm.family == VisibleFamily::binary) v[i] = sigmoid(v[i]);
  }
  return v;
}

Vector sample_hidden(const RbmParams& rbm, std::span<const double> v, Rng& rng) {
  Vector h = prop_up(rbm, v);
  for (double& x : h) x = bernoulli(x, rng);
  return h;
}

Vector sample_visible(const RbmParams& rbm, std::span<const double> h, Rng& rng) {
  Vector v = prop_down(rbm, h);
  if (rbm.family == VisibleFamily::binary) {
    for (double& x : v) x = bernoulli(x, rng);
  } else {
    for (double& x : v) x = gaussian(x, 1.0, rng);
  }
  return v;
}

GibbsSample gibbs_step(const RbmParams& rbm, std::span<const double> v, Rng& rng) {
  require(rbm.n_hidden() > 0, "gibbs_step: RBM has no hidden units");
  GibbsSample s;
  s.hidden = sample_hidden(rbm, v, rng);
  s.visible = sample_visible(rbm, s.hidden, rng);
  return s;
}

void cd_update(RbmParams& rbm, std::span<const Vector> batch, const CdConfig& cfg,
               RbmVelocity& velocity, Rng& rng) {
  require(!batch.empty(), "cd_update: empty batch");
  cfg.validate();
  const std::size_t nv = rbm.n_visible();
  const std::size_t nh = rbm.n_hidden();

  Matrix grad_w(nv, nh);
  Vector grad_v(nv, 0.0);
  Vector grad_h(nh, 0.0);

  for (const Vector& v0 : batch) {
    check_visible(rbm, v0, "cd_update");
    const Vector h0 = prop_up(rbm, v0);

    // Negative chain restarted from the data.
    Vector h = h0;
    Vector v;
    for (std::size_t step = 0; step < cfg.k; ++step) {
      if (!cfg.deterministic_activations)
        for (double& x : h) x = bernoulli(x, rng);
      v = cfg.deterministic_activations ? prop_down(rbm, h) : sample_visible(rbm, h, rng);
      h = prop_up(rbm, v);
    }

    for (std::size_t i = 0; i < nv; ++i) {
      auto row = grad_w.row(i);
      for (std::size_t j = 0; j < nh; ++j) row[j] += v0[i] * h0[j] - v[i] * h[j];
      grad_v[i] += v0[i] - v[i];
    }
    for (std::size_t j = 0; j < nh; ++j) grad_h[j] += h0[j] - h[j];
  }

  const double scale = cfg.learning_rate / static_cast<double>(batch.size());
  auto apply = [&](std::span<double> param, std::span<double> vel, std::span<const double> grad) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      vel[i] = cfg.momentum * vel[i] + scale * grad[i];
      param[i] += vel[i];
    }
  };
  apply(rbm.weights.entries(), velocity.weights.entries(), grad_w.entries());
  apply(rbm.v_bias, velocity.v_bias, grad_v);
  apply(rbm.h_bias, velocity.h_bias, grad_h);
}

void train_rbm(RbmParams& rbm, const std::vector<Vector>& data, const CdConfig& cfg, Rng& rng,
               const EpochCallback& on_epoch) {
  require(!data.empty(), "train_rbm: empty data");
  cfg.validate();
  rbm.validate();
  for (const auto& v : data) check_visible(rbm, v, "train_rbm");

  std::vector<Vector> shuffled = data;
  rng.shuffle(shuffled);
  RbmVelocity velocity = RbmVelocity::zeros_like(rbm);
  const std::size_t mb = std::min(cfg.minibatch_size, shuffled.size());

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t start = 0; start < shuffled.size(); start += mb) {
      std::size_t len = std::min(mb, shuffled.size() - start);
      cd_update(rbm, std::span<const Vector>(shuffled).subspan(start, len), cfg, velocity, rng);
    }
    if (on_epoch) on_epoch(epoch, rbm);
  }
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double free_energy(const RbmParams& rbm, std::span<const double> v) {
  require(rbm.family == VisibleFamily::binary,
          "free_energy: only supported for binary visible units");
  check_visible(rbm, v, "free_energy");
  double f = -dot(v, rbm.v_bias);
  Vector act = matvec_transposed(rbm.weights, v);
  for (std::size_t j = 0; j < act.size(); ++j) f -= softplus(act[j] + rbm.h_bias[j]);
  return f;
}

double log_partition(const RbmParams& rbm) {
  require(rbm.family == VisibleFamily::binary,
          "log_partition: only supported for binary visible units");
  if (!(rbm.n_visible() + rbm.n_hidden() <= kMaxEnumerationUnits)) fail("log_partition: model too large to enumerate (" +
              std::to_string(rbm.n_visible() + rbm.n_hidden()) + " units, cap " +
              std::to_string(kMaxEnumerationUnits) + ")");
  const std::size_t nv = rbm.n_visible();
  const std::size_t count = std::size_t{1} << nv;
  Vector neg_f(count);
  Vector v(nv);
  for (std::size_t code = 0; code < count; ++code) {
    for (std::size_t i = 0; i < nv; ++i) v[i] = static_cast<double>((code >> i) & 1U);
    neg_f[code] = -free_energy(rbm, v);
  }
  return log_sum_exp(neg_f);
}

double exact_log_likelihood(const RbmParams& rbm, const std::vector<Vector>& data) {
  require(!data.empty(), "exact_log_likelihood: empty data");
  const double log_z = log_partition(rbm);
  double total = 0.0;
  for (const auto& v : data) total += -free_energy(rbm, v) - log_z;
  return total / static_cast<double>(data.size());
}

}  // namespace deepdyna
