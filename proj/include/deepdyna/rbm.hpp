#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "deepdyna/numeric.hpp"

namespace deepdyna {

enum class VisibleFamily { binary, gaussian };

/// One RBM layer. Hidden units are always binary; visible units are either
/// binary or Gaussian with unit variance (inputs standardized beforehand).
struct RbmParams {
  Matrix weights;  // n_visible × n_hidden
  Vector v_bias;
  Vector h_bias;
  VisibleFamily family = VisibleFamily::binary;

  std::size_t n_visible() const { return v_bias.size(); }
  std::size_t n_hidden() const { return h_bias.size(); }

  static RbmParams zeros(std::size_t n_visible, std::size_t n_hidden,
                         VisibleFamily family = VisibleFamily::binary);
  /// Weights i.i.d. N(0, stddev²), biases zero.
  static RbmParams random(std::size_t n_visible, std::size_t n_hidden, Rng& rng,
                          double stddev = 0.01, VisibleFamily family = VisibleFamily::binary);

  void validate() const;
  friend bool operator==(const RbmParams&, const RbmParams&) = default;
};

struct CdConfig {
  std::size_t k = 1;
  double learning_rate = 0.1;
  double momentum = 0.0;
  std::size_t epochs = 1;
  std::size_t minibatch_size = 10;
  /// Replace every sampled activity by its probability (or mean).
  bool deterministic_activations = false;

  void validate() const;
};

/// Momentum accumulator shaped like the RBM parameters.
struct RbmVelocity {
  Matrix weights;
  Vector v_bias;
  Vector h_bias;

  static RbmVelocity zeros_like(const RbmParams& rbm);
};

/// P(h_j = 1 | v) for every hidden unit.
Vector prop_up(const RbmParams& rbm, std::span<const double> v);
/// P(v_i = 1 | h) for binary visibles, E[v_i | h] for Gaussian visibles.
Vector prop_down(const RbmParams& rbm, std::span<const double> h);

Vector sample_hidden(const RbmParams& rbm, std::span<const double> v, Rng& rng);
Vector sample_visible(const RbmParams& rbm, std::span<const double> h, Rng& rng);

struct GibbsSample {
  Vector hidden;
  Vector visible;
};

/// One block-Gibbs sweep v → h ~ P(h|v) → v' ~ P(v|h).
GibbsSample gibbs_step(const RbmParams& rbm, std::span<const double> v, Rng& rng);

/// Applies one CD_k update from a single minibatch. The velocity carries the
/// momentum term between calls.
void cd_update(RbmParams& rbm, std::span<const Vector> batch, const CdConfig& cfg,
               RbmVelocity& velocity, Rng& rng);

/// Called after each completed epoch with its 1-based index.
using EpochCallback = std::function<void(std::size_t epoch, const RbmParams&)>;

/// Full training loop: the data is shuffled once, cut into contiguous
/// minibatches, and swept `cfg.epochs` times.
void train_rbm(RbmParams& rbm, const std::vector<Vector>& data, const CdConfig& cfg, Rng& rng,
               const EpochCallback& on_epoch = {});

/// F(v) = −v·b − Σ_j log(1 + exp(c_j + (vᵀW)_j)); binary visibles only.
double free_energy(const RbmParams& rbm, std::span<const double> v);

/// log Z by enumerating every visible configuration.
double log_partition(const RbmParams& rbm);

/// Mean log P(v) over `data`, computed exactly. Requires
/// n_visible + n_hidden ≤ kMaxEnumerationUnits.
double exact_log_likelihood(const RbmParams& rbm, const std::vector<Vector>& data);

inline constexpr std::size_t kMaxEnumerationUnits = 20;

/// log(1 + e^x) without overflow.
double softplus(double x);

}  // namespace deepdyna
