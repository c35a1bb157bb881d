#include "deepdyna/temporal.hpp"

#include <algorithm>

namespace deepdyna {

void TemporalModel::validate() const {
  rbm.validate();
  require(rbm.n_visible() % 2 == 0, "TemporalModel: visible layer size must be even");
  require(rbm.family == VisibleFamily::binary, "TemporalModel: visible units must be binary");
  require(sampling.gibbs_steps >= 1, "TemporalModel: need at least one Gibbs step");
}

const TemporalModel& TemporalModelSet::for_action(std::size_t action) const {
  for (const auto& m : models)
    if (m.action == action) return m;
  throw std::invalid_argument("TemporalModelSet: no model for action " + std::to_string(action));
}

bool TemporalModelSet::has_action(std::size_t action) const {
  return std::any_of(models.begin(), models.end(),
                     [&](const TemporalModel& m) { return m.action == action; });
}

Vector concat_pair(const LatentPair& pair) {
  Vector v;
  v.reserve(pair.h_t.size() + pair.h_next.size());
  v.insert(v.end(), pair.h_t.begin(), pair.h_t.end());
  v.insert(v.end(), pair.h_next.begin(), pair.h_next.end());
  return v;
}

namespace {

std::vector<Vector> concat_all(const std::vector<LatentPair>& pairs) {
  require(!pairs.empty(), "train_temporal: empty pair list");
  const std::size_t h = pairs.front().h_t.size();
  require(h > 0, "train_temporal: zero-length latent vectors");
  std::vector<Vector> data;
  data.reserve(pairs.size());
  for (const auto& p : pairs) {
    require(p.h_t.size() == h && p.h_next.size() == h,
            "train_temporal: inconsistent latent dimensions");
    data.push_back(concat_pair(p));
  }
  return data;
}

}  // namespace

TemporalModel train_temporal(std::size_t action, const std::vector<LatentPair>& pairs,
                             std::size_t n_hidden, const CdConfig& cfg, Rng& rng,
                             const SamplingConfig& sampling, double init_stddev,
                             const EpochCallback& on_epoch) {
  std::vector<Vector> data = concat_all(pairs);
  TemporalModel model;
  model.action = action;
  model.sampling = sampling;
  model.rbm = RbmParams::random(data.front().size(), n_hidden, rng, init_stddev);
  model.validate();
  train_rbm(model.rbm, data, cfg, rng, on_epoch);
  return model;
}

void continue_temporal(TemporalModel& model, const std::vector<LatentPair>& pairs,
                       const CdConfig& cfg, Rng& rng, const EpochCallback& on_epoch) {
  std::vector<Vector> data = concat_all(pairs);
  require(data.front().size() == model.rbm.n_visible(),
          "continue_temporal: pair size does not match the model");
  train_rbm(model.rbm, data, cfg, rng, on_epoch);
}

Vector sample_next_observed(const TemporalModel& model, std::span<const double> h_t, Rng& rng,
                            const ChainObserver& observer) {
  const std::size_t H = model.latent_size();
  if (!(h_t.size() == H)) fail("sample_next: h_t has length " + std::to_string(h_t.size()) +
                               ", expected " + std::to_string(H));
  require(model.rbm.n_hidden() > 0, "sample_next: temporal RBM has no hidden units");
  const RbmParams& rbm = model.rbm;
  const std::size_t nh = rbm.n_hidden();

  Vector visible(2 * H);
  for (std::size_t i = 0; i < H; ++i) {
    require(h_t[i] >= 0.0 && h_t[i] <= 1.0, "sample_next: h_t entries must lie in [0,1]");
    visible[i] = model.sampling.clamp == ClampMode::sample ? bernoulli(h_t[i], rng)
                                                           : (h_t[i] >= 0.5 ? 1.0 : 0.0);
  }
  for (std::size_t i = H; i < 2 * H; ++i) visible[i] = bernoulli(0.5, rng);

  Vector free_probs(H, 0.5);
  Vector hidden(nh);
  for (std::size_t step = 0; step < model.sampling.gibbs_steps; ++step) {
    hidden = prop_up(rbm, visible);
    for (double& x : hidden) x = bernoulli(x, rng);
    // Only the h_{t+1} half is resampled; the clamped half never changes.
    for (std::size_t i = 0; i < H; ++i) {
      const std::size_t vi = H + i;
      double a = rbm.v_bias[vi] + dot(rbm.weights.row(vi), hidden);
      free_probs[i] = sigmoid(a);
      visible[vi] = bernoulli(free_probs[i], rng);
    }
    if (observer) observer(visible);
  }

  if (model.sampling.output == NextStateOutput::sample)
    return Vector(visible.begin() + static_cast<std::ptrdiff_t>(H), visible.end());
  return free_probs;
}

Vector sample_next(const TemporalModel& model, std::span<const double> h_t, Rng& rng) {
  return sample_next_observed(model, h_t, rng, {});
}

Vector predict_next_observation(const DbnStack& stack, const TemporalModel& model,
                                std::span<const double> s_t, Rng& rng) {
  if (!(model.latent_size() == stack.code_size())) fail("predict_next_observation: temporal model latent size " +
              std::to_string(model.latent_size()) + " does not match stack code size " +
              std::to_string(stack.code_size()));
  return decode(stack, sample_next(model, encode(stack, s_t), rng));
}

std::vector<Vector> sample_trajectory(const DbnStack& stack, const TemporalModelSet& models,
                                      std::span<const double> s_0, const ActionSource& actions,
                                      std::size_t K, Rng& rng) {
  require(K >= 1, "sample_trajectory: K must be at least 1");
  if (const auto* list = std::get_if<std::vector<std::size_t>>(&actions))
    require(list->size() >= K, "sample_trajectory: action list shorter than K");

  std::vector<Vector> out;
  out.reserve(K);
  Vector current(s_0.begin(), s_0.end());
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t a = 0;
    if (const auto* list = std::get_if<std::vector<std::size_t>>(&actions))
      a = (*list)[k];
    else
      a = std::get<ObservationPolicy>(actions)(current, rng);
    current = predict_next_observation(stack, models.for_action(a), current, rng);
    out.push_back(current);
  }
  return out;
}

}  // namespace deepdyna
