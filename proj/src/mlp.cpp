#include "deepdyna/mlp.hpp"

#include <algorithm>
#include <cmath>

namespace deepdyna {

namespace {

void activate(Activation act, Vector& z) {
  switch (act) {
    case Activation::sigmoid:
      for (double& x : z) x = sigmoid(x);
      break;
    case Activation::identity:
      break;
    case Activation::softmax:
      z = softmax(z);
      break;
  }
}

template <typename Fn>
void for_each_block(DenseNetwork& net, Fn&& fn) {
  for (auto& layer : net.layers) {
    fn(layer.weights.entries());
    fn(std::span<double>(layer.bias));
  }
}

}  // namespace

Vector softmax(std::span<const double> z) {
  Vector out(z.begin(), z.end());
  double m = *std::max_element(out.begin(), out.end());
  double s = 0.0;
  for (double& x : out) {
    x = std::exp(x - m);
    s += x;
  }
  for (double& x : out) x /= s;
  return out;
}

void DenseNetwork::validate() const {
  require(!layers.empty(), "DenseNetwork: no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    require(layers[l].bias.size() == layers[l].outputs(), "DenseNetwork: bias length mismatch");
    if (l > 0)
      require(layers[l].inputs() == layers[l - 1].outputs(),
              "DenseNetwork: consecutive layer sizes do not chain");
  }
}

Vector DenseNetwork::forward(std::span<const double> x) const {
  Vector a(x.begin(), x.end());
  for (const auto& layer : layers) {
    Vector z = matvec(layer.weights, a);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += layer.bias[i];
    activate(layer.activation, z);
    a = std::move(z);
  }
  return a;
}

DenseNetwork::Trace DenseNetwork::forward_trace(std::span<const double> x) const {
  Trace trace;
  trace.reserve(layers.size() + 1);
  trace.emplace_back(x.begin(), x.end());
  for (const auto& layer : layers) {
    Vector z = matvec(layer.weights, trace.back());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += layer.bias[i];
    activate(layer.activation, z);
    trace.push_back(std::move(z));
  }
  return trace;
}

void DenseNetwork::backward(const Trace& trace, Vector delta, DenseNetwork& grad) const {
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    const Vector& input = trace[l];
    auto& g = grad.layers[l];
    for (std::size_t o = 0; o < layer.outputs(); ++o) {
      if (delta[o] == 0.0) continue;
      axpy(delta[o], input, g.weights.row(o));
      g.bias[o] += delta[o];
    }
    if (l == 0) break;
    Vector next = matvec_transposed(layer.weights, delta);
    const auto& below = layers[l - 1];
    const Vector& a = trace[l];
    switch (below.activation) {
      case Activation::sigmoid:
        for (std::size_t i = 0; i < next.size(); ++i) next[i] *= a[i] * (1.0 - a[i]);
        break;
      case Activation::identity:
        break;
      case Activation::softmax:
        throw std::logic_error("DenseNetwork::backward: softmax only supported on the output layer");
    }
    delta = std::move(next);
  }
}

DenseNetwork DenseNetwork::zeros_like() const {
  DenseNetwork z;
  z.layers.reserve(layers.size());
  for (const auto& layer : layers)
    z.layers.push_back({Matrix(layer.outputs(), layer.inputs()), Vector(layer.outputs(), 0.0),
                        layer.activation});
  return z;
}

std::size_t DenseNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

double& DenseNetwork::parameter(std::size_t index) {
  for (auto& layer : layers) {
    if (index < layer.weights.size()) return layer.weights.entries()[index];
    index -= layer.weights.size();
    if (index < layer.bias.size()) return layer.bias[index];
    index -= layer.bias.size();
  }
  throw std::out_of_range("DenseNetwork::parameter: index out of range");
}

double DenseNetwork::parameter(std::size_t index) const {
  return const_cast<DenseNetwork&>(*this).parameter(index);
}

void sgd_momentum_step(DenseNetwork& params, DenseNetwork& velocity, const DenseNetwork& grad,
                       double lr, double momentum) {
  std::vector<std::span<double>> p, v;
  for_each_block(params, [&](std::span<double> s) { p.push_back(s); });
  for_each_block(velocity, [&](std::span<double> s) { v.push_back(s); });
  std::vector<std::span<const double>> g;
  for (const auto& layer : grad.layers) {
    g.push_back(layer.weights.entries());
    g.push_back(layer.bias);
  }
  for (std::size_t b = 0; b < p.size(); ++b)
    for (std::size_t i = 0; i < p[b].size(); ++i) {
      v[b][i] = momentum * v[b][i] - lr * g[b][i];
      p[b][i] += v[b][i];
    }
}

}  // namespace deepdyna
