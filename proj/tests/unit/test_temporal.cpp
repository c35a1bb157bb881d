#include <cmath>

#include "deepdyna/eval.hpp"
#include "deepdyna/temporal.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace deepdyna;

namespace {

TemporalModel random_model(std::size_t H, std::size_t nh, std::uint64_t seed) {
  Rng rng(seed);
  TemporalModel m;
  m.rbm = RbmParams::random(2 * H, nh, rng, 1.0);
  for (double& b : m.rbm.v_bias) b = gaussian(0.0, 1.0, rng);
  for (double& b : m.rbm.h_bias) b = gaussian(0.0, 1.0, rng);
  return m;
}

}  // namespace

TEST_SUITE("temporal") {

TEST_CASE("concat_pair") {
  CHECK(concat_pair({{1, 0}, {0.5, 0.25}}) == Vector{1, 0, 0.5, 0.25});
}

TEST_CASE("model set lookups") {
  TemporalModelSet set;
  set.models.push_back(random_model(2, 3, 1));
  set.models.back().action = 2;
  CHECK(set.has_action(2));
  CHECK_FALSE(set.has_action(0));
  CHECK(&set.for_action(2) == &set.models[0]);
  CHECK_THROWS_AS(set.for_action(0), std::invalid_argument);
}

TEST_CASE("clamped chain samples the exact conditional") {
  TemporalModel m = random_model(2, 4, 5);
  m.sampling.gibbs_steps = 100;
  m.sampling.output = NextStateOutput::sample;
  Rng rng(6);
  for (const Vector& h_t : {Vector{0, 1}, Vector{1, 1}}) {
    const Vector exact = oracle::temporal_conditional(m.rbm, h_t);
    Vector freq(4, 0.0);
    const int n = 5000;
    for (int i = 0; i < n; ++i) {
      const Vector s = sample_next(m, h_t, rng);
      freq[static_cast<std::size_t>(s[0] + 2 * s[1])] += 1.0 / n;
    }
    CHECK(total_variation(freq, exact) < 0.05);
  }
}

TEST_CASE("probability output stays in the unit interval") {
  TemporalModel m = random_model(3, 5, 7);
  m.sampling.gibbs_steps = 5;
  Rng rng(1);
  const Vector p = sample_next(m, Vector{0.2, 0.9, 0.5}, rng);
  CHECK(p.size() == 3);
  for (double x : p) CHECK((x > 0.0 && x < 1.0));
  CHECK_THROWS(sample_next(m, Vector{0.2, 0.9}, rng));
  CHECK_THROWS(sample_next(m, Vector{0.2, 0.9, 1.5}, rng));
}

TEST_CASE("training learns a deterministic successor") {
  std::vector<LatentPair> pairs;
  for (int i = 0; i < 50; ++i) {
    pairs.push_back({{1, 0, 0}, {0, 1, 0}});
    pairs.push_back({{0, 1, 0}, {0, 0, 1}});
    pairs.push_back({{0, 0, 1}, {1, 0, 0}});
  }
  CdConfig cd;
  cd.k = 5;
  cd.learning_rate = 0.1;
  cd.momentum = 0.5;
  cd.epochs = 200;
  cd.minibatch_size = 10;
  Rng rng(8);
  SamplingConfig sampling;
  sampling.gibbs_steps = 30;
  sampling.clamp = ClampMode::threshold;
  TemporalModel m = train_temporal(0, pairs, 12, cd, rng, sampling);
  CHECK(m.latent_size() == 3);
  int hits = 0;
  for (int i = 0; i < 100; ++i) hits += sample_next(m, Vector{1, 0, 0}, rng)[1] > 0.5 ? 1 : 0;
  CHECK(hits >= 90);
}

TEST_CASE("trajectories need enough actions") {
  Rng rng(9);
  DbnStack stack;
  stack.layers.push_back(RbmParams::random(6, 2, rng, 0.5));
  TemporalModelSet set;
  set.models.push_back(random_model(1, 3, 10));
  set.models.back().rbm = RbmParams::random(4, 3, rng, 0.5);
  set.models.back().sampling.gibbs_steps = 3;
  const Vector s0{1, 0, 1, 0, 1, 0};
  CHECK_THROWS(sample_trajectory(stack, set, s0, std::vector<std::size_t>{0, 0}, 3, rng));
  const auto traj = sample_trajectory(stack, set, s0, std::vector<std::size_t>{0, 0, 0}, 3, rng);
  CHECK(traj.size() == 3);
  for (const auto& o : traj) CHECK(o.size() == 6);
  ObservationPolicy always_zero = [](std::span<const double>, Rng&) { return std::size_t{0}; };
  CHECK(sample_trajectory(stack, set, s0, always_zero, 4, rng).size() == 4);
}

}
