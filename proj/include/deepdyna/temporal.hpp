#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "deepdyna/dbn.hpp"
#include "deepdyna/numeric.hpp"
#include "deepdyna/rbm.hpp"

namespace deepdyna {

/// How the h_t half of the temporal RBM is binarized before clamping.
enum class ClampMode { sample, threshold };
/// What sample_next hands back for h_{t+1}.
enum class NextStateOutput { probabilities, sample };

struct SamplingConfig {
  std::size_t gibbs_steps = 50;
  ClampMode clamp = ClampMode::sample;
  NextStateOutput output = NextStateOutput::probabilities;
};

/// Temporal RBM for one action: visible units are [h_t, h_{t+1}].
struct TemporalModel {
  std::size_t action = 0;
  RbmParams rbm;
  SamplingConfig sampling;

  std::size_t latent_size() const { return rbm.n_visible() / 2; }
  void validate() const;
  friend bool operator==(const TemporalModel& a, const TemporalModel& b) {
    return a.action == b.action && a.rbm == b.rbm &&
           a.sampling.gibbs_steps == b.sampling.gibbs_steps && a.sampling.clamp == b.sampling.clamp &&
           a.sampling.output == b.sampling.output;
  }
};

struct LatentPair {
  Vector h_t;
  Vector h_next;
};

/// One temporal model per action id; lookups of a missing action throw.
struct TemporalModelSet {
  std::vector<TemporalModel> models;

  const TemporalModel& for_action(std::size_t action) const;
  bool has_action(std::size_t action) const;
  friend bool operator==(const TemporalModelSet&, const TemporalModelSet&) = default;
};

/// Concatenates [h_t, h_next].
Vector concat_pair(const LatentPair& pair);

/// Trains a fresh temporal RBM (weights N(0, init_stddev²)) on concatenated
/// pairs with CD.
TemporalModel train_temporal(std::size_t action, const std::vector<LatentPair>& pairs,
                             std::size_t n_hidden, const CdConfig& cfg, Rng& rng,
                             const SamplingConfig& sampling = {}, double init_stddev = 0.01,
                             const EpochCallback& on_epoch = {});

/// Continues CD training of an existing model.
void continue_temporal(TemporalModel& model, const std::vector<LatentPair>& pairs,
                       const CdConfig& cfg, Rng& rng, const EpochCallback& on_epoch = {});

/// Clamped Gibbs chain: the h_t half is held at a binarized copy of `h_t`
/// while the h_{t+1} half and the hidden layer are resampled.
Vector sample_next(const TemporalModel& model, std::span<const double> h_t, Rng& rng);

/// Optional hook observing every state of the clamped chain (clamped half,
/// free half) after each sweep. Used by tests to check clamp preservation.
using ChainObserver = std::function<void(std::span<const double> visible)>;
Vector sample_next_observed(const TemporalModel& model, std::span<const double> h_t, Rng& rng,
                            const ChainObserver& observer);

/// decode(sample_next(encode(s_t)))
Vector predict_next_observation(const DbnStack& stack, const TemporalModel& model,
                                std::span<const double> s_t, Rng& rng);

using ObservationPolicy = std::function<std::size_t(std::span<const double> observation, Rng&)>;
using ActionSource = std::variant<std::vector<std::size_t>, ObservationPolicy>;

/// K-step rollout rooted at an observed state. Each prediction is fed back
/// as the next input. Actions come from the fixed list (which must have at
/// least K entries) or are queried from the policy on each simulated
/// observation.
std::vector<Vector> sample_trajectory(const DbnStack& stack, const TemporalModelSet& models,
                                      std::span<const double> s_0, const ActionSource& actions,
                                      std::size_t K, Rng& rng);

}  // namespace deepdyna
