#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "deepdyna/envs.hpp"
#include "deepdyna/linear_model.hpp"
#include "deepdyna/numeric.hpp"
#include "deepdyna/temporal.hpp"

namespace deepdyna {

/// V^π for a stochastic policy (n_states × n_actions), solved directly.
/// Terminal states are pinned to 0.
Vector solve_exact_values(const TabularMdp& env, const Matrix& policy);

struct OptimalSolution {
  Vector values;
  std::vector<std::size_t> policy;
  std::size_t iterations = 0;
};

/// Value iteration until the sup-norm residual drops to `tol`; greedy policy
/// with lowest-index tie-break.
OptimalSolution solve_optimal(const TabularMdp& env, double tol);

/// Q(s, a) under the arrived-state reward convention, given V.
double action_value(const TabularMdp& env, const Vector& values, std::size_t s, std::size_t a);

/// Deterministic policy as a one-hot n_states × n_actions matrix.
Matrix deterministic_policy(const TabularMdp& env, std::span<const std::size_t> actions);

double total_variation(std::span<const double> p, std::span<const double> q);

/// Index of the Euclidean-nearest template, lowest index on ties.
std::size_t nearest_class(std::span<const double> decoded, const std::vector<Vector>& templates);

/// Empirical next-state frequencies per action; rows with no samples stay zero.
struct KernelEstimate {
  std::vector<Matrix> frequencies;
  std::vector<std::vector<std::size_t>> counts;  // [action][state]
};

/// Draws a predicted next observation for (observation, action).
using NextObservationSampler =
    std::function<Vector(std::span<const double> observation, std::size_t action, Rng& rng)>;

NextObservationSampler generative_sampler(const DbnStack& stack, const TemporalModelSet& models);

/// For every non-terminal state and every listed action, draws
/// `samples_per_state` predictions rooted at the state's canonical
/// observation, decodes each by nearest class, and normalizes the counts.
KernelEstimate empirical_kernel(const NextObservationSampler& sampler, const ObservationMap& map,
                                const TabularMdp& env, std::span<const std::size_t> actions,
                                std::size_t samples_per_state, Rng& rng);
KernelEstimate empirical_kernel(const DbnStack& stack, const TemporalModelSet& models,
                                const ObservationMap& map, const TabularMdp& env,
                                std::size_t samples_per_state, Rng& rng);

/// Mean over non-terminal states (and the given actions, all when empty) of
/// the row-wise total variation against the true kernel.
double kernel_tv(const KernelEstimate& estimate, const TabularMdp& env,
                 std::span<const std::size_t> actions = {});

/// Row-wise TV between two full kernels, averaged over the listed states.
double mean_row_tv(const Matrix& estimate, const Matrix& truth, std::span<const std::size_t> rows);

std::vector<std::size_t> non_terminal_states(const TabularMdp& env);

Matrix matrix_power(const Matrix& m, std::size_t k);

/// TV(k) for k = 0..k_max between the empirical k-step state distribution of
/// rooted simulated rollouts and the exact k-step kernel of the given policy
/// kernel. Rollouts are rooted `trajectories` times at every non-terminal
/// state's canonical observation; actions are drawn uniformly at random.
std::vector<double> kstep_tv(const NextObservationSampler& sampler, const TabularMdp& env,
                             const ObservationMap& map, std::size_t k_max,
                             std::size_t trajectories, Rng& rng);

/// Feeds the expected next feature vector back as the next observation.
NextObservationSampler linear_sampler(const LinearExpectationModel& model);

struct RolloutScore {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

/// Scores K-step rollouts with uniformly random actions, `rollouts_per_root`
/// times from every non-terminal canonical observation. A step is correct
/// when its nearest class is reachable in one step from the previous class
/// under the chosen action and the prediction lies closer to that class's
/// template than half the smallest distance between two templates. A
/// rollout stops once its decoded class is terminal.
RolloutScore rollout_accuracy(const NextObservationSampler& sampler, const TabularMdp& env,
                              const ObservationMap& map, std::size_t K,
                              std::size_t rollouts_per_root, Rng& rng);

/// Mean absolute error.
double value_error(std::span<const double> estimates, std::span<const double> truth);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  double stderr_ = 0.0;
};
using Curve = std::vector<CurvePoint>;

/// Pointwise mean and standard error over curves sharing the same x grid.
Curve average_curves(const std::vector<Curve>& curves);

/// Step-function resampling: value at grid point g is the y of the last
/// point with x ≤ g (or `before` when none).
Curve resample_curve(const Curve& curve, std::span<const double> grid, double before);

/// First x at which the curve's trailing moving average over `window`
/// points reaches `threshold`, if ever.
std::optional<double> first_crossing(const Curve& curve, double threshold, std::size_t window);

}  // namespace deepdyna
