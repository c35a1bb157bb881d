// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "deepdyna/pipeline.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace deepdyna;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

// ---------------------------------------------------------------- AC1

Outcome ac1() {
  const std::vector<Vector> data{{1, 1, 0, 0}, {1, 1, 1, 0}, {0, 0, 1, 1}, {1, 0, 0, 0}};
  Rng rng(derive_seed(1, "ac1"));
  RbmParams rbm = RbmParams::random(4, 4, rng, 0.1);
  CdConfig cfg;
  cfg.k = 10;
  cfg.learning_rate = 0.1;
  cfg.momentum = 0.0;
  cfg.minibatch_size = 4;
  cfg.epochs = 450;
  const std::size_t every = cfg.epochs / 9;
  Vector ll{oracle::joint_log_likelihood(rbm, data)};
  train_rbm(rbm, data, cfg, rng, [&](std::size_t epoch, const RbmParams& p) {
    if (epoch % every == 0) ll.push_back(oracle::joint_log_likelihood(p, data));
  });
  bool monotone = true;
  for (std::size_t i = 1; i < ll.size(); ++i) monotone = monotone && ll[i] > ll[i - 1];
  const double gain = ll.back() - ll.front();
  std::string trace;
  for (double x : ll) trace += " " + fmt(x, 5);
  return {ll.size() == 10 && monotone && gain >= 0.3,
          "checkpoints" + trace + "; gain " + fmt(gain) + (monotone ? "" : "; not monotone")};
}

// ---------------------------------------------------------------- AC2

std::vector<std::size_t> random_coordinates(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  idx.resize(std::min(n, count));
  return idx;
}

double worst_error(const Vector& analytic, const Vector& numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    worst = std::max(worst, oracle::relative_error(analytic[i], numeric[i]));
  return worst;
}

double check_network(const DenseNetwork& net, const DenseNetwork& grad,
                     const std::function<double(const DenseNetwork&)>& loss, Rng& rng) {
  const auto coords = random_coordinates(net.parameter_count(), 100, rng);
  Vector flat(net.parameter_count()), analytic;
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = net.parameter(i);
  for (std::size_t c : coords) analytic.push_back(grad.parameter(c));
  auto f = [&](const Vector& x) {
    DenseNetwork copy = net;
    for (std::size_t i = 0; i < x.size(); ++i) copy.parameter(i) = x[i];
    return loss(copy);
  };
  return worst_error(analytic, oracle::central_differences(f, flat, coords, 1e-5));
}

Outcome ac2() {
  Rng rng(derive_seed(2, "ac2"));
  const World w = build_world(preset("desk-grid"));
  std::vector<Vector> obs;
  std::vector<std::size_t> labels;
  std::vector<double> rewards;
  for (std::size_t i = 0; i < 20; ++i) {
    const std::size_t s = rng.uniform_index(w.env.n_states);
    Vector o = w.map.canonical(s);
    for (double& x : o)
      if (rng.uniform() < 0.1) x = 1.0 - x;
    obs.push_back(o);
    labels.push_back(s % 10);
    rewards.push_back(w.env.rewards[s]);
  }

  TrainSchedule schedule = preset("desk-grid").model.schedule(w.map.dim());
  for (auto& c : schedule.layer_configs) c.epochs = 5;
  schedule.init_stddev = 0.3;
  const DenseNetwork ae = unroll(greedy_train(obs, schedule, rng));
  DenseNetwork ae_grad = ae.zeros_like();
  autoencoder_loss_and_gradient(ae, obs, ae_grad);
  const double e_ae = check_network(ae, ae_grad, [&](const DenseNetwork& n) { return autoencoder_loss(n, obs); }, rng);

  const ClassifierHead head = ClassifierHead::create({w.map.dim(), 32, 10}, rng);
  DenseNetwork cl_grad = head.net.zeros_like();
  classifier_loss_and_gradient(head, obs, labels, cl_grad);
  const double e_cl = check_network(head.net, cl_grad, [&](const DenseNetwork& n) {
    ClassifierHead h = head;
    h.net = n;
    return classifier_loss(h, obs, labels);
  }, rng);

  RewardModel rm{Vector(w.map.dim()), 0.1};
  for (double& x : rm.weights) x = gaussian(0.0, 0.3, rng);
  const LogisticGradient g = logistic_loss_and_gradient(rm, obs, rewards);
  Vector flat = rm.weights;
  flat.push_back(rm.bias);
  const auto coords = random_coordinates(flat.size(), 100, rng);
  Vector analytic;
  for (std::size_t c : coords) analytic.push_back(c < rm.weights.size() ? g.weights[c] : g.bias);
  auto loss = [&](const Vector& x) {
    return logistic_loss_and_gradient(RewardModel{Vector(x.begin(), x.end() - 1), x.back()}, obs, rewards).loss;
  };
  const double e_rw = worst_error(analytic, oracle::central_differences(loss, flat, coords, 1e-5));

  const double worst = std::max({e_ae, e_cl, e_rw});
  return {worst <= 1e-4, "max relative error fine-tune " + fmt(e_ae, 3) + ", classifier " +
                             fmt(e_cl, 3) + ", reward " + fmt(e_rw, 3) + " (" +
                             std::to_string(coords.size()) + " reward coordinates)"};
}

// ---------------------------------------------------------------- AC3

Outcome ac3() {
  Rng rng(derive_seed(3, "ac3"));
  TemporalModel m;
  m.rbm = RbmParams::random(6, 6, rng, 1.0);
  for (double& b : m.rbm.v_bias) b = gaussian(0.0, 1.0, rng);
  for (double& b : m.rbm.h_bias) b = gaussian(0.0, 1.0, rng);
  m.sampling.gibbs_steps = 200;
  m.sampling.clamp = ClampMode::threshold;
  m.sampling.output = NextStateOutput::sample;
  bool ok = true;
  std::string detail = "TV per h_t:";
  for (int t = 0; t < 3; ++t) {
    Vector h_t(3);
    for (double& x : h_t) x = bernoulli(0.5, rng);
    const Vector exact = oracle::temporal_conditional(m.rbm, h_t);
    Vector freq(8, 0.0);
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
      const Vector s = sample_next(m, h_t, rng);
      freq[static_cast<std::size_t>(s[0] + 2 * s[1] + 4 * s[2])] += 1.0;
    }
    for (double& f : freq) f /= draws;
    const double tv = total_variation(freq, exact);
    ok = ok && tv <= 0.05;
    detail += " [" + fmt(h_t[0], 1) + fmt(h_t[1], 1) + fmt(h_t[2], 1) + "] " + fmt(tv, 3);
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- AC4, AC5

Outcome chain_td(ValueScheme scheme, double tolerance) {
  const ExperimentConfig cfg = preset("desk-chain");
  const World w = build_world(cfg);
  const Vector truth = solve_exact_values(w.env, uniform_policy(w.env));
  EvaluationConfig ec;
  ec.scheme = scheme;
  const bool tab = scheme == ValueScheme::tabular;
  ec.alpha = tab ? cfg.agent.td_alpha_tabular : cfg.agent.td_alpha_linear;
  ec.updates = tab ? cfg.agent.td_updates_tabular : cfg.agent.td_updates_linear;
  ec.checkpoint_every = cfg.agent.td_checkpoint_every;
  Rng rng(derive_seed(cfg.seed, tab ? "ac4" : "ac5"));
  const EvaluationResult r = evaluate_td(w.env, w.map, truth, ec, {}, nullptr, rng);
  const double err = value_error(r.estimates, truth);
  return {err <= tolerance, "alpha " + fmt(ec.alpha) + ", " + std::to_string(ec.updates) +
                                " updates, mean absolute error " + fmt(err) + " (limit " +
                                fmt(tolerance) + ")"};
}

// ---------------------------------------------------------------- shared desk-grid models

struct GridModels {
  ExperimentConfig cfg;
  World world;
  std::vector<WorldModelBundle> bundles;
  double train_seconds = 0.0;
};

GridModels& grid_models() {
  static std::optional<GridModels> g;
  if (!g) {
    const auto t0 = Clock::now();
    GridModels m;
    m.cfg = preset("desk-grid");
    m.world = build_world(m.cfg);
    for (std::size_t i = 0; i < m.cfg.model.models; ++i) {
      const Dataset data = generate_dataset(m.cfg, m.world, i);
      m.bundles.push_back(train_world_model(m.cfg, m.world, data, i));
      std::cerr << "  desk-grid model " << i << " trained (" << fmt(seconds_since(t0), 4) << " s)\n";
    }
    m.train_seconds = seconds_since(t0);
    g = std::move(m);
  }
  return *g;
}

// ---------------------------------------------------------------- AC6

Outcome ac6() {
  const GridModels& g = grid_models();
  std::size_t good_seeds = 0;
  std::string detail;
  for (std::size_t m = 0; m < g.bundles.size(); ++m) {
    std::map<std::size_t, std::pair<double, double>> first_last;
    std::map<std::size_t, std::size_t> first_epoch, last_epoch;
    for (const auto& c : g.bundles[m].checkpoints) {
      if (!first_epoch.count(c.action) || c.epoch < first_epoch[c.action]) {
        first_epoch[c.action] = c.epoch;
        first_last[c.action].first = c.kernel_tv;
      }
      if (!last_epoch.count(c.action) || c.epoch >= last_epoch[c.action]) {
        last_epoch[c.action] = c.epoch;
        first_last[c.action].second = c.kernel_tv;
      }
    }
    std::size_t good_actions = 0;
    detail += " seed" + std::to_string(m) + ":";
    for (const auto& [a, fl] : first_last) {
      good_actions += fl.second <= 0.5 * fl.first;
      detail += " " + fmt(fl.first, 2) + "->" + fmt(fl.second, 2);
    }
    good_seeds += good_actions >= 3;
  }
  return {g.bundles.size() == 5 && good_seeds >= 4,
          std::to_string(good_seeds) + "/5 seeds with >=3 of 4 actions halved;" + detail +
              " (training " + fmt(g.train_seconds, 4) + " s)"};
}

// ---------------------------------------------------------------- AC7

Outcome ac7() {
  const ExperimentConfig cfg = preset("desk-chain");
  const World w = build_world(cfg);
  const Dataset data = generate_dataset(cfg, w, 0);
  const WorldModelBundle b = train_world_model(cfg, w, data, 0);
  Rng rng(derive_seed(cfg.seed, "ac7"));
  const auto tv = kstep_tv(generative_sampler(b.stack, b.temporal), w.env, w.map, 20,
                           cfg.eval.kstep_trajectories, rng);
  double worst = 0.0;
  std::size_t at = 1;
  for (std::size_t k = 1; k <= 20; ++k)
    if (tv[k] > worst) worst = tv[k], at = k;
  return {worst <= tv[1] + 0.15, "TV(1) " + fmt(tv[1], 3) + ", max TV(k) " + fmt(worst, 3) +
                                     " at k=" + std::to_string(at) + ", excess " +
                                     fmt(worst - tv[1], 3) + " (" +
                                     std::to_string(cfg.eval.kstep_trajectories) +
                                     " rollouts per root)"};
}

// ---------------------------------------------------------------- AC8

std::optional<double> steps_to_target(AgentKind kind, const GridModels& g, const std::string& label,
                                      double target) {
  const std::size_t seeds = 20;
  AgentConfig ac = g.cfg.agent.agent_config(g.world.env.gamma);
  if (kind == AgentKind::model_free) ac.K = 0;
  std::vector<ControlResult> runs;
  std::size_t longest = 0;
  for (std::size_t r = 0; r < seeds; ++r) {
    const WorldModelBundle& b = g.bundles[r % g.bundles.size()];
    auto model = make_world_model(kind, g.world, b);
    Rng rng(derive_seed(1000 + r, label));
    runs.push_back(run_dyna(g.world.env, g.world.map, model.get(), ac, g.cfg.agent.episodes, rng));
    longest = std::max(longest, runs.back().curve.back().cumulative_steps);
  }
  std::vector<double> grid;
  for (std::size_t x = 10; x <= longest; x += 10) grid.push_back(static_cast<double>(x));
  std::vector<Curve> curves;
  for (const auto& r : runs) {
    Curve c;
    for (const auto& e : r.curve)
      c.push_back({static_cast<double>(e.cumulative_steps), e.discounted_return, 0.0});
    curves.push_back(resample_curve(c, grid, 0.0));
  }
  return first_crossing(average_curves(curves), target, 5);
}

Outcome ac8() {
  const GridModels& g = grid_models();
  const OptimalSolution opt = solve_optimal(g.world.env, g.cfg.eval.optimal_tolerance);
  const double target = 0.9 * opt.values[g.world.env.start_state];
  const auto mf = steps_to_target(AgentKind::model_free, g, "mf", target);
  const auto oracle = steps_to_target(AgentKind::dyna_oracle, g, "oracle", target);
  const auto gen = steps_to_target(AgentKind::dyna_generative, g, "gen", target);
  auto show = [](const std::optional<double>& x) { return x ? fmt(*x, 6) : std::string("never"); };
  const bool ok = mf && oracle && gen && *oracle <= 0.5 * *mf && *gen <= 0.8 * *mf;
  return {ok, "steps to " + fmt(target, 4) + ": model-free " + show(mf) + ", dyna-oracle " +
                  show(oracle) + ", dyna-generative " + show(gen) + " (20 seeds)"};
}

// ---------------------------------------------------------------- AC9

Outcome ac9() {
  const GridModels& g = grid_models();
  double gen = 0.0, lin = 0.0;
  for (std::size_t m = 0; m < g.bundles.size(); ++m) {
    const auto& b = g.bundles[m];
    Rng rg(derive_seed(m, "ac9/generative")), rl(derive_seed(m, "ac9/linear"));
    gen += rollout_accuracy(generative_sampler(b.stack, b.temporal), g.world.env, g.world.map, 10, 4, rg).accuracy();
    lin += rollout_accuracy(linear_sampler(b.linear), g.world.env, g.world.map, 10, 4, rl).accuracy();
  }
  gen /= static_cast<double>(g.bundles.size());
  lin /= static_cast<double>(g.bundles.size());
  return {gen >= lin + 0.15, "generative " + fmt(gen, 3) + ", linear " + fmt(lin, 3) +
                                 ", margin " + fmt(100.0 * (gen - lin), 3) + " points"};
}

// ---------------------------------------------------------------- AC10

std::uint64_t file_hash(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::map<std::string, std::uint64_t> tree_hashes(const fs::path& root) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = file_hash(e.path());
  return out;
}

Outcome ac10(const std::string& cli, const fs::path& work) {
  ExperimentConfig cfg = preset("desk-chain");
  cfg.model.models = 2;
  cfg.agent.runs_per_model = 1;
  cfg.agent.baseline_runs = 2;
  cfg.agent.td_updates_tabular = 4000;
  cfg.agent.td_updates_linear = 4000;
  cfg.agent.td_checkpoint_every = 1000;
  cfg.eval.kstep_trajectories = 20;
  const fs::path dir = work / "ac10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path ini = dir / "config.ini";
  save_config(ini, cfg);

  const std::vector<std::string> stages{
      "gen-data", "train-model", "run --agent model-free", "run --agent dyna-generative",
      "run --agent dyna-linear", "run --agent dyna-oracle", "eval"};
  for (const char* rep : {"a", "b"})
    for (const auto& stage : stages) {
      const std::string cmd = "\"" + cli + "\" " + stage + " --config \"" + ini.string() +
                              "\" --out \"" + (dir / rep).string() + "\" --quiet";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
    }
  const auto a = tree_hashes(dir / "a"), b = tree_hashes(dir / "b");
  std::size_t differing = 0;
  std::string first;
  for (const auto& [name, h] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != h) {
      ++differing;
      if (first.empty()) first = name;
    }
  }
  differing += b.size() > a.size() ? b.size() - a.size() : 0;
  std::set<std::string> stage_dirs;
  for (const auto& [name, h] : a) stage_dirs.insert(name.substr(0, name.find('/')));
  return {differing == 0 && !a.empty() && a.size() == b.size(),
          std::to_string(a.size()) + " files over " + std::to_string(stage_dirs.size()) +
              " stage directories, " + std::to_string(differing) + " differ" +
              (first.empty() ? "" : " (first: " + first + ")")};
}

// ---------------------------------------------------------------- AC11

Outcome ac11() {
  const auto results = properties::run_all(11, 50);
  std::size_t passed = 0;
  std::string failures;
  for (const auto& r : results) {
    if (r.passed)
      ++passed;
    else
      failures += "; " + r.name + ": " + r.detail;
  }
  return {passed == results.size(),
          std::to_string(passed) + "/" + std::to_string(results.size()) + " properties hold over 50 instances each" + failures};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string cli;
  std::string work = "acceptance-work";
  std::vector<int> only;
  app.add_option("--cli", cli, "path to the deepdyna executable")->required();
  app.add_option("--work", work, "scratch directory");
  app.add_option("--only", only, "criterion numbers to run");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, 30, ac1},
      {2, 10, ac2},
      {3, 120, ac3},
      {4, 20, [] { return chain_td(ValueScheme::tabular, 0.01); }},
      {5, 120, [] { return chain_td(ValueScheme::linear, 0.1); }},
      {6, 900, ac6},
      {7, 300, ac7},
      {8, 1200, ac8},
      {9, 600, ac9},
      {10, 300, [&] { return ac10(cli, work); }},
      {11, 300, ac11},
  };

  std::size_t failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double t = seconds_since(t0);
    const bool in_time = t <= c.budget_seconds;
    const bool pass = o.passed && in_time;
    failed += !pass;
    std::cout << "AC" << c.id << (c.id < 10 ? "  " : " ") << (pass ? "PASS" : "FAIL") << "  "
              << o.detail << "  [" << fmt(t, 4) << " s of " << c.budget_seconds << " s"
              << (in_time ? "" : ", over budget") << "]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
