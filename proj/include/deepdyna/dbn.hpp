#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "deepdyna/mlp.hpp"
#include "deepdyna/numeric.hpp"
#include "deepdyna/rbm.hpp"

namespace deepdyna {

/// Untied generative weights for one layer after fine-tuning.
/// weights: n_visible × n_hidden of the matching RBM; bias: n_visible.
struct DecoderLayer {
  Matrix weights;
  Vector bias;
  friend bool operator==(const DecoderLayer&, const DecoderLayer&) = default;
};

/// Greedily trained stack of RBMs used as an autoencoder. Until fine-tuning
/// the decoder reuses the tied RBM weights; afterwards `decoder` holds one
/// untied layer per RBM (same order, bottom first).
struct DbnStack {
  std::vector<RbmParams> layers;
  bool fine_tuned = false;
  std::vector<DecoderLayer> decoder;

  std::size_t input_size() const { return layers.front().n_visible(); }
  std::size_t code_size() const { return layers.back().n_hidden(); }
  VisibleFamily bottom_family() const { return layers.front().family; }

  void validate() const;
  friend bool operator==(const DbnStack&, const DbnStack&) = default;
};

struct TrainSchedule {
  std::vector<std::size_t> hidden_sizes;  // bottom to top
  std::vector<CdConfig> layer_configs;    // one per layer
  VisibleFamily bottom_family = VisibleFamily::binary;
  double init_stddev = 0.01;
  double finetune_learning_rate = 0.01;
  std::size_t finetune_sweeps = 0;
  std::size_t finetune_minibatch = 10;

  void validate() const;
};

/// Called after each layer finishes greedy training.
using LayerCallback = std::function<void(std::size_t layer, const DbnStack& partial)>;

/// Layer 0 learns the raw data; layer i>0 learns layer i−1's upward
/// probabilities of the data.
DbnStack greedy_train(const std::vector<Vector>& data, const TrainSchedule& schedule, Rng& rng,
                      const LayerCallback& on_layer = {});

/// Deterministic upward pass of probabilities.
Vector encode(const DbnStack& stack, std::span<const double> v);
/// Downward pass of probabilities (means for a Gaussian bottom layer).
Vector decode(const DbnStack& stack, std::span<const double> h);

/// Encoder followed by the mirrored decoder as one dense network.
DenseNetwork unroll(const DbnStack& stack);
/// Writes unrolled parameters back, marking the stack fine-tuned.
DbnStack fold(const DbnStack& shape, const DenseNetwork& net);

/// Mean over data of ½‖decode(encode(v)) − v‖².
double autoencoder_loss(const DenseNetwork& net, std::span<const Vector> data);
/// Same loss plus its gradient with respect to every network parameter.
double autoencoder_loss_and_gradient(const DenseNetwork& net, std::span<const Vector> data,
                                     DenseNetwork& grad);

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, std::size_t sweep)
      : std::runtime_error(what), sweep_(sweep) {}
  std::size_t sweep() const { return sweep_; }

 private:
  std::size_t sweep_;
};

/// Backprop fine-tuning of the unrolled autoencoder with minibatch SGD.
/// Throws TrainingDiverged when the loss stops being finite.
DbnStack fine_tune(const DbnStack& stack, const std::vector<Vector>& data, double lr,
                   std::size_t sweeps, Rng& rng, std::size_t minibatch_size = 10);

/// Mean absolute per-pixel reconstruction error divided by the pixel value
/// range (1 for binary data, max − min of the data otherwise).
double reconstruction_error(const DbnStack& stack, const std::vector<Vector>& data);

/// Supervised head mapping an input vector to class probabilities.
struct ClassifierHead {
  DenseNetwork net;
  bool encoded_input = false;  // true: feed encode(v) instead of the raw observation

  std::size_t n_classes() const { return net.outputs(); }
  std::size_t input_size() const { return net.inputs(); }

  /// Sigmoid hidden layers and a softmax output; layer_sizes includes the
  /// input and output sizes.
  static ClassifierHead create(const std::vector<std::size_t>& layer_sizes, Rng& rng);
  friend bool operator==(const ClassifierHead&, const ClassifierHead&) = default;
};

/// Mean cross-entropy and its gradient.
double classifier_loss_and_gradient(const ClassifierHead& head, std::span<const Vector> inputs,
                                    std::span<const std::size_t> labels, DenseNetwork& grad);
double classifier_loss(const ClassifierHead& head, std::span<const Vector> inputs,
                       std::span<const std::size_t> labels);

ClassifierHead train_classifier(ClassifierHead head, const std::vector<Vector>& inputs,
                                const std::vector<std::size_t>& labels, double lr,
                                double momentum, std::size_t sweeps, Rng& rng,
                                std::size_t minibatch_size = 10);

Vector class_probabilities(const ClassifierHead& head, std::span<const double> v);
/// Argmax class, lowest index on ties.
std::size_t classify(const ClassifierHead& head, std::span<const double> v);

}  // namespace deepdyna
