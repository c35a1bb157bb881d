#include "deepdyna/dbn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace deepdyna {

void DbnStack::validate() const {
  require(!layers.empty(), "DbnStack: at least one layer required");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].validate();
    if (i > 0)
      if (!(layers[i].n_visible() == layers[i - 1].n_hidden())) fail("DbnStack: layer " + std::to_string(i) + " does not chain onto layer " +
                  std::to_string(i - 1));
    if (i > 0) require(layers[i].family == VisibleFamily::binary,
                       "DbnStack: only the bottom layer may have Gaussian visibles");
  }
  if (fine_tuned) {
    require(decoder.size() == layers.size(), "DbnStack: decoder layer count mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i)
      if (!(decoder[i].weights.rows() == layers[i].n_visible() &&
                  decoder[i].weights.cols() == layers[i].n_hidden() &&
                  decoder[i].bias.size() == layers[i].n_visible())) fail("DbnStack: decoder layer " + std::to_string(i) + " has the wrong shape");
  } else {
    require(decoder.empty(), "DbnStack: decoder present on a stack that is not fine-tuned");
  }
}

void TrainSchedule::validate() const {
  require(!hidden_sizes.empty(), "TrainSchedule: no layers");
  require(layer_configs.size() == hidden_sizes.size(),
          "TrainSchedule: need one CdConfig per layer");
  for (const auto& cfg : layer_configs) cfg.validate();
}

DbnStack greedy_train(const std::vector<Vector>& data, const TrainSchedule& schedule, Rng& rng,
                      const LayerCallback& on_layer) {
  require(!data.empty(), "greedy_train: empty data");
  schedule.validate();
  const std::size_t n = data.front().size();
  for (const auto& v : data) require(v.size() == n, "greedy_train: inconsistent vector lengths");

  DbnStack stack;
  std::vector<Vector> layer_input = data;
  std::size_t n_visible = n;
  for (std::size_t l = 0; l < schedule.hidden_sizes.size(); ++l) {
    VisibleFamily family = l == 0 ? schedule.bottom_family : VisibleFamily::binary;
    RbmParams rbm =
        RbmParams::random(n_visible, schedule.hidden_sizes[l], rng, schedule.init_stddev, family);
    train_rbm(rbm, layer_input, schedule.layer_configs[l], rng);
    for (auto& v : layer_input) v = prop_up(rbm, v);
    n_visible = rbm.n_hidden();
    stack.layers.push_back(std::move(rbm));
    if (on_layer) on_layer(l, stack);
  }
  return stack;
}

Vector encode(const DbnStack& stack, std::span<const double> v) {
  require(!stack.layers.empty(), "encode: empty stack");
  if (!(v.size() == stack.input_size())) fail("encode: input has length " + std::to_string(v.size()) +
                                              ", expected " + std::to_string(stack.input_size()));
  Vector h(v.begin(), v.end());
  for (const auto& rbm : stack.layers) h = prop_up(rbm, h);
  return h;
}

Vector decode(const DbnStack& stack, std::span<const double> h) {
  require(!stack.layers.empty(), "decode: empty stack");
  if (!(h.size() == stack.code_size())) fail("decode: code has length " + std::to_string(h.size()) +
                                             ", expected " + std::to_string(stack.code_size()));
  Vector a(h.begin(), h.end());
  for (std::size_t l = stack.layers.size(); l-- > 0;) {
    const RbmParams& rbm = stack.layers[l];
    if (!stack.fine_tuned) {
      a = prop_down(rbm, a);
      continue;
    }
    const DecoderLayer& d = stack.decoder[l];
    Vector z = matvec(d.weights, a);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] += d.bias[i];
      if (rbm.family == VisibleFamily::binary) z[i] = sigmoid(z[i]);
    }
    a = std::move(z);
  }
  return a;
}

DenseNetwork unroll(const DbnStack& stack) {
  stack.validate();
  DenseNetwork net;
  for (const auto& rbm : stack.layers)
    net.layers.push_back({rbm.weights.transposed(), rbm.h_bias, Activation::sigmoid});
  for (std::size_t l = stack.layers.size(); l-- > 0;) {
    const RbmParams& rbm = stack.layers[l];
    Activation act =
        rbm.family == VisibleFamily::binary ? Activation::sigmoid : Activation::identity;
    if (stack.fine_tuned)
      net.layers.push_back({stack.decoder[l].weights, stack.decoder[l].bias, act});
    else
      net.layers.push_back({rbm.weights, rbm.v_bias, act});
  }
  return net;
}

DbnStack fold(const DbnStack& shape, const DenseNetwork& net) {
  const std::size_t depth = shape.layers.size();
  require(net.layers.size() == 2 * depth, "fold: network depth does not match the stack");
  DbnStack out = shape;
  out.fine_tuned = true;
  out.decoder.assign(depth, {});
  for (std::size_t l = 0; l < depth; ++l) {
    out.layers[l].weights = net.layers[l].weights.transposed();
    out.layers[l].h_bias = net.layers[l].bias;
    const DenseLayer& dec = net.layers[2 * depth - 1 - l];
    out.decoder[l] = {dec.weights, dec.bias};
  }
  out.validate();
  return out;
}

namespace {

// dL/dz at the output for ½‖y − t‖².
Vector mse_output_delta(const DenseLayer& out_layer, const Vector& y, std::span<const double> t) {
  Vector delta(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    delta[i] = y[i] - t[i];
    if (out_layer.activation == Activation::sigmoid) delta[i] *= y[i] * (1.0 - y[i]);
  }
  return delta;
}

double half_squared_error(const Vector& y, std::span<const double> t) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - t[i]) * (y[i] - t[i]);
  return 0.5 * s;
}

void scale_network(DenseNetwork& net, double factor) {
  for (auto& layer : net.layers) {
    for (double& w : layer.weights.entries()) w *= factor;
    for (double& b : layer.bias) b *= factor;
  }
}

}  // namespace

double autoencoder_loss(const DenseNetwork& net, std::span<const Vector> data) {
  require(!data.empty(), "autoencoder_loss: empty data");
  double total = 0.0;
  for (const auto& v : data) total += half_squared_error(net.forward(v), v);
  return total / static_cast<double>(data.size());
}

double autoencoder_loss_and_gradient(const DenseNetwork& net, std::span<const Vector> data,
                                     DenseNetwork& grad) {
  require(!data.empty(), "autoencoder_loss_and_gradient: empty data");
  grad = net.zeros_like();
  double total = 0.0;
  for (const auto& v : data) {
    auto trace = net.forward_trace(v);
    const Vector& y = trace.back();
    total += half_squared_error(y, v);
    net.backward(trace, mse_output_delta(net.layers.back(), y, v), grad);
  }
  const double inv = 1.0 / static_cast<double>(data.size());
  scale_network(grad, inv);
  return total * inv;
}

DbnStack fine_tune(const DbnStack& stack, const std::vector<Vector>& data, double lr,
                   std::size_t sweeps, Rng& rng, std::size_t minibatch_size) {
  require(!data.empty(), "fine_tune: empty data");
  require(minibatch_size >= 1, "fine_tune: minibatch size must be positive");
  DenseNetwork net = unroll(stack);
  DenseNetwork velocity = net.zeros_like();
  DenseNetwork grad;

  std::vector<Vector> shuffled = data;
  rng.shuffle(shuffled);
  const std::size_t mb = std::min(minibatch_size, shuffled.size());

  for (std::size_t sweep = 1; sweep <= sweeps; ++sweep) {
    double sweep_loss = 0.0;
    for (std::size_t start = 0; start < shuffled.size(); start += mb) {
      std::size_t len = std::min(mb, shuffled.size() - start);
      auto batch = std::span<const Vector>(shuffled).subspan(start, len);
      sweep_loss += autoencoder_loss_and_gradient(net, batch, grad) * static_cast<double>(len);
      sgd_momentum_step(net, velocity, grad, lr, 0.0);
    }
    if (!std::isfinite(sweep_loss))
      throw TrainingDiverged("fine_tune: non-finite loss at sweep " + std::to_string(sweep), sweep);
  }
  return fold(stack, net);
}

double reconstruction_error(const DbnStack& stack, const std::vector<Vector>& data) {
  require(!data.empty(), "reconstruction_error: empty data");
  double range = 1.0;
  if (stack.bottom_family() == VisibleFamily::gaussian) {
    double lo = data.front().front(), hi = lo;
    for (const auto& v : data)
      for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    if (hi > lo) range = hi - lo;
  }
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& v : data) {
    Vector r = decode(stack, encode(stack, v));
    for (std::size_t i = 0; i < v.size(); ++i) total += std::abs(r[i] - v[i]);
    count += v.size();
  }
  return total / static_cast<double>(count) / range;
}

ClassifierHead ClassifierHead::create(const std::vector<std::size_t>& layer_sizes, Rng& rng) {
  require(layer_sizes.size() >= 2, "ClassifierHead: need at least input and output sizes");
  ClassifierHead head;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    std::size_t in = layer_sizes[l], out = layer_sizes[l + 1];
    require(in > 0 && out > 0, "ClassifierHead: zero-width layer");
    DenseLayer layer{Matrix(out, in), Vector(out, 0.0),
                     l + 2 == layer_sizes.size() ? Activation::softmax : Activation::sigmoid};
    const double stddev = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& w : layer.weights.entries()) w = gaussian(0.0, stddev, rng);
    head.net.layers.push_back(std::move(layer));
  }
  return head;
}

double classifier_loss_and_gradient(const ClassifierHead& head, std::span<const Vector> inputs,
                                    std::span<const std::size_t> labels, DenseNetwork& grad) {
  require(!inputs.empty(), "classifier_loss_and_gradient: empty input");
  require(inputs.size() == labels.size(), "classifier_loss_and_gradient: length mismatch");
  grad = head.net.zeros_like();
  double total = 0.0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    if (!(labels[n] < head.n_classes())) fail("classifier: label " + std::to_string(labels[n]) +
                                              " out of range");
    auto trace = head.net.forward_trace(inputs[n]);
    Vector delta = trace.back();
    total -= std::log(std::max(delta[labels[n]], 1e-300));
    delta[labels[n]] -= 1.0;
    head.net.backward(trace, std::move(delta), grad);
  }
  const double inv = 1.0 / static_cast<double>(inputs.size());
  scale_network(grad, inv);
  return total * inv;
}

double classifier_loss(const ClassifierHead& head, std::span<const Vector> inputs,
                       std::span<const std::size_t> labels) {
  DenseNetwork grad;
  return classifier_loss_and_gradient(head, inputs, labels, grad);
}

ClassifierHead train_classifier(ClassifierHead head, const std::vector<Vector>& inputs,
                                const std::vector<std::size_t>& labels, double lr,
                                double momentum, std::size_t sweeps, Rng& rng,
                                std::size_t minibatch_size) {
  require(inputs.size() == labels.size(), "train_classifier: inputs and labels differ in length");
  require(!inputs.empty(), "train_classifier: empty data");
  for (std::size_t label : labels)
    if (!(label < head.n_classes())) fail("train_classifier: label " + std::to_string(label) + " out of range");
  require(minibatch_size >= 1, "train_classifier: minibatch size must be positive");

  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<Vector> xs;
  std::vector<std::size_t> ys;
  for (std::size_t i : order) {
    xs.push_back(inputs[i]);
    ys.push_back(labels[i]);
  }

  DenseNetwork velocity = head.net.zeros_like();
  DenseNetwork grad;
  const std::size_t mb = std::min(minibatch_size, xs.size());
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t start = 0; start < xs.size(); start += mb) {
      std::size_t len = std::min(mb, xs.size() - start);
      classifier_loss_and_gradient(head, std::span<const Vector>(xs).subspan(start, len),
                                   std::span<const std::size_t>(ys).subspan(start, len), grad);
      sgd_momentum_step(head.net, velocity, grad, lr, momentum);
    }
  }
  return head;
}

Vector class_probabilities(const ClassifierHead& head, std::span<const double> v) {
  if (!(v.size() == head.input_size())) fail("classify: input has length " +
                                             std::to_string(v.size()) + ", expected " +
                                             std::to_string(head.input_size()));
  return head.net.forward(v);
}

std::size_t classify(const ClassifierHead& head, std::span<const double> v) {
  return argmax(class_probabilities(head, v));
}

}  // namespace deepdyna
