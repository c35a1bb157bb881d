#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

using deepdyna::Matrix;
using deepdyna::RbmParams;

Vector central_differences(const std::function<double(const Vector&)>& f, Vector x,
                           const std::vector<std::size_t>& coords, double step) {
  Vector out;
  out.reserve(coords.size());
  for (std::size_t i : coords) {
    const double keep = x[i];
    x[i] = keep + step;
    const double up = f(x);
    x[i] = keep - step;
    const double down = f(x);
    x[i] = keep;
    out.push_back((up - down) / (2.0 * step));
  }
  return out;
}

double relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

std::vector<std::size_t> spread_coordinates(std::size_t n, std::size_t count) {
  std::vector<std::size_t> out;
  if (n <= count) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) out.push_back(i * n / count);
  return out;
}

Vector bits(std::size_t code, std::size_t n) {
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (code >> i) & 1u ? 1.0 : 0.0;
  return v;
}

namespace {

double neg_energy(const RbmParams& rbm, const Vector& v, const Vector& h) {
  double e = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    e += v[i] * rbm.v_bias[i];
    for (std::size_t j = 0; j < h.size(); ++j) e += v[i] * rbm.weights(i, j) * h[j];
  }
  for (std::size_t j = 0; j < h.size(); ++j) e += h[j] * rbm.h_bias[j];
  return e;
}

double log_sum_exp(const Vector& xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double log_marginal(const RbmParams& rbm, const Vector& v) {
  const std::size_t nh = rbm.n_hidden();
  Vector terms;
  for (std::size_t c = 0; c < (std::size_t{1} << nh); ++c) terms.push_back(neg_energy(rbm, v, bits(c, nh)));
  return log_sum_exp(terms);
}

}  // namespace

double joint_log_likelihood(const RbmParams& rbm, const std::vector<Vector>& data) {
  const std::size_t nv = rbm.n_visible();
  if (nv + rbm.n_hidden() > 20) throw std::invalid_argument("joint_log_likelihood: too many units");
  Vector all;
  for (std::size_t c = 0; c < (std::size_t{1} << nv); ++c) all.push_back(log_marginal(rbm, bits(c, nv)));
  const double log_z = log_sum_exp(all);
  double total = 0.0;
  for (const auto& v : data) total += log_marginal(rbm, v) - log_z;
  return total / static_cast<double>(data.size());
}

Vector temporal_conditional(const RbmParams& rbm, const Vector& h_t) {
  const std::size_t H = h_t.size();
  Vector logs;
  for (std::size_t c = 0; c < (std::size_t{1} << H); ++c) {
    Vector v = h_t;
    const Vector next = bits(c, H);
    v.insert(v.end(), next.begin(), next.end());
    logs.push_back(log_marginal(rbm, v));
  }
  const double norm = log_sum_exp(logs);
  for (double& x : logs) x = std::exp(x - norm);
  return logs;
}

Vector policy_values(const Matrix& kernel, const Vector& rewards, const std::vector<bool>& terminal,
                     double gamma) {
  const std::size_t n = rewards.size();
  Matrix a(n, n + 1);
  for (std::size_t s = 0; s < n; ++s) {
    a(s, s) = 1.0;
    if (terminal[s]) continue;
    for (std::size_t t = 0; t < n; ++t) {
      a(s, n) += kernel(s, t) * rewards[t];
      if (!terminal[t]) a(s, t) -= gamma * kernel(s, t);
    }
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    for (std::size_t c = 0; c <= n; ++c) std::swap(a(col, c), a(pivot, c));
    const double d = a(col, col);
    for (std::size_t c = 0; c <= n; ++c) a(col, c) /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0.0) continue;
      const double f = a(r, col);
      for (std::size_t c = 0; c <= n; ++c) a(r, c) -= f * a(col, c);
    }
  }
  Vector v(n);
  for (std::size_t s = 0; s < n; ++s) v[s] = a(s, n);
  return v;
}

}  // namespace oracle
