#pragma once

#include <span>
#include <vector>

#include "deepdyna/numeric.hpp"

namespace deepdyna {

enum class Activation { sigmoid, identity, softmax };

/// y = act(W·x + b), with W shaped out × in.
struct DenseLayer {
  Matrix weights;
  Vector bias;
  Activation activation = Activation::sigmoid;

  std::size_t inputs() const { return weights.cols(); }
  std::size_t outputs() const { return weights.rows(); }
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Feed-forward stack of dense layers trained by plain backprop. Used both
/// for the unrolled autoencoder and the supervised classifier head.
struct DenseNetwork {
  std::vector<DenseLayer> layers;

  std::size_t inputs() const { return layers.front().inputs(); }
  std::size_t outputs() const { return layers.back().outputs(); }

  /// Per-layer activations; entry 0 is the input, entry l+1 the output of layer l.
  using Trace = std::vector<Vector>;

  Vector forward(std::span<const double> x) const;
  Trace forward_trace(std::span<const double> x) const;

  /// Accumulates parameter gradients into `grad` given dL/dz of the final
  /// layer's pre-activation.
  void backward(const Trace& trace, Vector output_delta, DenseNetwork& grad) const;

  DenseNetwork zeros_like() const;
  std::size_t parameter_count() const;
  /// Flat view helpers used by optimizers and gradient checks.
  double& parameter(std::size_t index);
  double parameter(std::size_t index) const;

  void validate() const;
  friend bool operator==(const DenseNetwork&, const DenseNetwork&) = default;
};

/// params += velocity, velocity = momentum·velocity − lr·grad
void sgd_momentum_step(DenseNetwork& params, DenseNetwork& velocity, const DenseNetwork& grad,
                       double lr, double momentum);

Vector softmax(std::span<const double> z);

}  // namespace deepdyna
