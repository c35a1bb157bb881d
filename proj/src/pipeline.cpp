#include "deepdyna/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace deepdyna {

namespace {

namespace fs = std::filesystem;

void say(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

/// Config with the fields that must not influence outputs neutralized.
ExperimentConfig canonical(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.output_dir = ".";
  c.workers = 1;
  return c;
}

ArchiveInfo archive_info(const ExperimentConfig& cfg, std::uint64_t seed) {
  ArchiveInfo info;
  info.seed = seed;
  info.config_echo = render_config(canonical(cfg));
  return info;
}

/// True when `path` is an archive written from the same config and seed.
bool up_to_date(const fs::path& path, const ExperimentConfig& cfg, std::uint64_t seed) {
  if (!fs::exists(path)) return false;
  try {
    ArchiveInfo info = read_archive_info(path);
    return info.seed == seed && info.config_echo == render_config(canonical(cfg));
  } catch (const ArchiveError&) {
    return false;
  }
}

std::string indexed(const std::string& stem, std::size_t i) { return stem + "-" + std::to_string(i); }

void write_manifest(const ExperimentConfig& cfg, const std::string& stage,
                    const std::vector<fs::path>& files) {
  const fs::path dir = stage_dir(cfg, stage);
  fs::create_directories(dir);
  save_config(dir / "config.ini", canonical(cfg));
  std::vector<std::string> names;
  for (const auto& f : files) names.push_back(fs::relative(f, dir).generic_string());
  std::sort(names.begin(), names.end());
  std::ofstream out(dir / "manifest.txt", std::ios::trunc);
  out << "stage = " << stage << '\n';
  out << "config_hash = " << config_hash(canonical(cfg)) << '\n';
  out << "seed = " << cfg.seed << '\n';
  for (const auto& n : names) out << "file = " << n << '\n';
  if (!out) throw ArchiveError(ArchiveError::Code::io, "cannot write manifest in " + dir.string());
}

std::vector<Vector> stack_training_data(const ExperimentConfig& cfg, const Dataset& data) {
  std::vector<Vector> out;
  if (cfg.model.stack_data == StackData::states) {
    for (const auto& pool : data.observations.pools) out.insert(out.end(), pool.begin(), pool.end());
    return out;
  }
  out.reserve(data.transitions.size());
  for (const auto& t : data.transitions) {
    out.push_back(t.observation);
    if (t.done) out.push_back(t.observation_next);
  }
  return out;
}

double kernel_tv_for_action(const ExperimentConfig& cfg, const World& world, const DbnStack& stack,
                            const TemporalModel& model, std::size_t action, std::uint64_t seed) {
  Rng rng(seed);
  NextObservationSampler sampler = [&](std::span<const double> obs, std::size_t, Rng& r) {
    return predict_next_observation(stack, model, obs, r);
  };
  const std::size_t actions[] = {action};
  KernelEstimate est = empirical_kernel(sampler, world.map, world.env, actions,
                                        cfg.model.tv_samples, rng);
  return kernel_tv(est, world.env, actions);
}

std::uint64_t run_seed(const ExperimentConfig& cfg, AgentKind agent, std::size_t model,
                       std::size_t run) {
  return derive_seed(cfg.seed, std::string("run/") + to_string(agent) + "/" +
                                   std::to_string(model) + "/" + std::to_string(run));
}

void require_file(const fs::path& path, const std::string& stage) {
  if (!fs::exists(path))
    throw MissingInput("missing input " + path.string() + "; run the " + stage + " stage first",
                       stage);
}

std::vector<std::vector<double>> curve_rows(const Curve& c) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : c) rows.push_back({p.x, p.y, p.stderr_});
  return rows;
}

void run_chain(const ExperimentConfig& cfg, const World& world, AgentKind agent,
               const ProgressFn& progress, std::vector<fs::path>& files) {
  const fs::path dir = stage_dir(cfg, "run") / to_string(agent);
  fs::create_directories(dir);
  const Vector truth = solve_exact_values(world.env, uniform_policy(world.env));
  const bool model_based = agent == AgentKind::dyna_generative || agent == AgentKind::dyna_linear;
  const std::size_t n_models = model_based ? cfg.model.models : 1;
  const std::size_t n_runs = model_based ? cfg.agent.runs_per_model : cfg.agent.baseline_runs;

  std::vector<WorldModelBundle> bundles;
  for (std::size_t m = 0; m < n_models; ++m) bundles.push_back(load_world_model(cfg, m));

  struct Job {
    std::size_t model, run;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < n_models; ++m)
    for (std::size_t r = 0; r < n_runs; ++r) jobs.push_back({m, r});

  const ValueScheme schemes[] = {ValueScheme::tabular, ValueScheme::linear};
  const char* scheme_names[] = {"tab", "fa"};
  std::vector<std::vector<Curve>> curves(2, std::vector<Curve>(jobs.size()));

  Workers{cfg.workers}.for_each(jobs.size(), [&](std::size_t j) {
    const Job job = jobs[j];
    const WorldModelBundle& bundle = bundles[job.model];
    std::unique_ptr<WorldModel> model = make_world_model(agent, world, bundle);
    StateLabeler labeler = [&bundle](std::span<const double> obs) {
      return classify(*bundle.classifier, obs);
    };
    for (std::size_t s = 0; s < 2; ++s) {
      EvaluationConfig ec;
      ec.scheme = schemes[s];
      ec.alpha = s == 0 ? cfg.agent.td_alpha_tabular : cfg.agent.td_alpha_linear;
      ec.alpha_sim = cfg.agent.alpha_sim;
      ec.updates = s == 0 ? cfg.agent.td_updates_tabular : cfg.agent.td_updates_linear;
      ec.checkpoint_every = cfg.agent.td_checkpoint_every;
      ec.K = model ? cfg.agent.K : 0;
      Rng rng(derive_seed(run_seed(cfg, agent, job.model, job.run), scheme_names[s]));
      EvaluationResult res = evaluate_td(world.env, world.map, truth, ec, labeler, model.get(), rng);
      Curve c;
      for (const auto& p : res.curve) c.push_back({static_cast<double>(p.updates), p.value_error, 0.0});
      curves[s][j] = std::move(c);
    }
  });

  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      const fs::path p = dir / (std::string(scheme_names[s]) + "-model" +
                                std::to_string(jobs[j].model) + "-run" +
                                std::to_string(jobs[j].run) + ".csv");
      std::vector<std::vector<double>> rows;
      for (const auto& pt : curves[s][j]) rows.push_back({pt.x, pt.y});
      write_csv(p, {"updates", "value_error"}, rows);
      files.push_back(p);
    }
    const fs::path avg = dir / (std::string(scheme_names[s]) + "-mean.csv");
    write_csv(avg, {"updates", "value_error", "stderr"}, curve_rows(average_curves(curves[s])));
    files.push_back(avg);
  }
  say(progress, std::string("run: ") + to_string(agent) + " finished " +
                    std::to_string(jobs.size()) + " chain runs");
}

void run_grid(const ExperimentConfig& cfg, const World& world, AgentKind agent,
              const ProgressFn& progress, std::vector<fs::path>& files) {
  const fs::path dir = stage_dir(cfg, "run") / to_string(agent);
  fs::create_directories(dir);
  const bool model_based = agent == AgentKind::dyna_generative || agent == AgentKind::dyna_linear;
  const std::size_t n_models = model_based ? cfg.model.models : 1;
  const std::size_t n_runs = model_based ? cfg.agent.runs_per_model : cfg.agent.baseline_runs;

  std::vector<WorldModelBundle> bundles;
  if (model_based)
    for (std::size_t m = 0; m < n_models; ++m) bundles.push_back(load_world_model(cfg, m));

  AgentConfig ac = cfg.agent.agent_config(world.env.gamma);
  if (agent == AgentKind::model_free) ac.K = 0;

  struct Job {
    std::size_t model, run;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < n_models; ++m)
    for (std::size_t r = 0; r < n_runs; ++r) jobs.push_back({m, r});
  std::vector<ControlResult> results(jobs.size());

  Workers{cfg.workers}.for_each(jobs.size(), [&](std::size_t j) {
    static const WorldModelBundle kNone{};
    const WorldModelBundle& bundle = model_based ? bundles[jobs[j].model] : kNone;
    std::unique_ptr<WorldModel> model = make_world_model(agent, world, bundle);
    Rng rng(run_seed(cfg, agent, jobs[j].model, jobs[j].run));
    results[j] = run_dyna(world.env, world.map, model.get(), ac, cfg.agent.episodes, rng);
  });

  std::vector<Curve> by_episode;
  std::vector<Curve> by_steps;
  std::size_t max_steps = 0;
  for (const auto& r : results) max_steps = std::max(max_steps, r.curve.back().cumulative_steps);
  const std::size_t stride = std::max<std::size_t>(1, max_steps / 200);
  std::vector<double> grid;
  for (std::size_t x = stride; x <= max_steps; x += stride) grid.push_back(static_cast<double>(x));

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& res = results[j];
    const std::string tag =
        "model" + std::to_string(jobs[j].model) + "-run" + std::to_string(jobs[j].run);
    std::vector<std::vector<double>> rows;
    Curve ep, st;
    for (const auto& e : res.curve) {
      rows.push_back({static_cast<double>(e.episode), static_cast<double>(e.steps),
                      static_cast<double>(e.cumulative_steps), e.undiscounted_return,
                      e.discounted_return, e.epsilon, e.alpha_sim});
      ep.push_back({static_cast<double>(e.episode), e.discounted_return, 0.0});
      st.push_back({static_cast<double>(e.cumulative_steps), e.discounted_return, 0.0});
    }
    const fs::path p = dir / ("curve-" + tag + ".csv");
    write_csv(p,
              {"episode", "steps", "cumulative_steps", "return", "discounted_return", "epsilon",
               "alpha_sim"},
              rows);
    files.push_back(p);
    by_episode.push_back(std::move(ep));
    by_steps.push_back(resample_curve(st, grid, 0.0));

    std::vector<Vector> features;
    for (std::size_t s = 0; s < world.env.n_states; ++s) features.push_back(world.map.canonical(s));
    const auto policy = extract_policy(res.q, features);
    std::vector<std::vector<double>> prow;
    for (std::size_t s = 0; s < policy.size(); ++s)
      prow.push_back({static_cast<double>(s), static_cast<double>(s / cfg.env.cols),
                      static_cast<double>(s % cfg.env.cols), static_cast<double>(policy[s]),
                      world.env.is_terminal(s) ? 1.0 : 0.0});
    const fs::path pp = dir / ("policy-" + tag + ".csv");
    write_csv(pp, {"state", "row", "col", "action", "terminal"}, prow);
    files.push_back(pp);
  }
  const fs::path pe = dir / "mean-by-episode.csv";
  write_csv(pe, {"episode", "discounted_return", "stderr"}, curve_rows(average_curves(by_episode)));
  const fs::path ps = dir / "mean-by-steps.csv";
  write_csv(ps, {"real_steps", "discounted_return", "stderr"}, curve_rows(average_curves(by_steps)));
  files.push_back(pe);
  files.push_back(ps);
  say(progress, std::string("run: ") + to_string(agent) + " finished " +
                    std::to_string(jobs.size()) + " control runs");
}

}  // namespace

World build_world(const ExperimentConfig& cfg) {
  World w;
  w.kind = cfg.env.kind;
  if (cfg.env.kind == EnvKind::chain) {
    w.env = build_chain_env(cfg.env.states, cfg.env.p_advance, cfg.env.reward_state, cfg.env.gamma);
  } else {
    w.env = build_grid_env(cfg.env.rows, cfg.env.cols, cfg.env.p_success,
                           grid_row_states(cfg.env.rows, cfg.env.cols, cfg.env.reward_row),
                           cfg.env.gamma);
  }
  if (cfg.observations.source == ObservationSource::synthetic) {
    Rng rng(derive_seed(cfg.seed, "observations"));
    w.map = make_synthetic_observations(w.env.n_states, cfg.observations.side,
                                        cfg.observations.variants, cfg.observations.noise, rng);
  } else {
    w.map = observations_from_idx(cfg.observations.idx_images, cfg.observations.idx_labels,
                                  w.env.n_states, cfg.observations.idx_per_class);
  }
  return w;
}

ObservationMap observations_from_idx(const fs::path& images, const fs::path& labels,
                                     std::size_t n_classes, std::size_t per_class) {
  IdxData img = load_idx(images);
  IdxData lab = load_idx(labels);
  require(img.dims.size() == 3, "observations_from_idx: image file must be 3-dimensional");
  require(lab.dims.size() == 1 && lab.dims[0] == img.dims[0],
          "observations_from_idx: label file does not match the image file");
  ObservationMap map;
  map.height = img.dims[1];
  map.width = img.dims[2];
  map.pools.assign(n_classes, {});
  for (std::size_t i = 0; i < img.items.size(); ++i) {
    const std::size_t c = lab.raw[i];
    if (c >= n_classes) continue;
    if (per_class != 0 && map.pools[c].size() >= per_class) continue;
    map.pools[c].push_back(img.items[i]);
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (!(!map.pools[c].empty())) fail("observations_from_idx: class " + std::to_string(c) +
                                       " has no images");
    Vector mean(map.dim(), 0.0);
    for (const auto& x : map.pools[c]) axpy(1.0, x, mean);
    for (double& v : mean) v /= static_cast<double>(map.pools[c].size());
    map.templates.push_back(std::move(mean));
  }
  map.validate();
  return map;
}

Dataset generate_dataset(const ExperimentConfig& cfg, const World& world, std::size_t index) {
  Rng rng(derive_seed(cfg.seed, indexed("data", index)));
  Dataset d;
  d.observations = world.map;
  d.transitions = collect_transitions(world.env, world.map, {}, cfg.data.steps, rng);
  return d;
}

WorldModelBundle train_world_model(const ExperimentConfig& cfg, const World& world,
                                   const Dataset& data, std::size_t index,
                                   const ProgressFn& progress) {
  const std::string tag = indexed("model", index);
  WorldModelBundle b;
  const std::vector<Vector> images = stack_training_data(cfg, data);
  const TrainSchedule schedule = cfg.model.schedule(world.map.dim());

  Rng stack_rng(derive_seed(cfg.seed, tag + "/stack"));
  b.stack = greedy_train(images, schedule, stack_rng, [&](std::size_t layer, const DbnStack&) {
    say(progress, tag + ": layer " + std::to_string(layer) + " trained");
  });
  if (cfg.model.finetune_sweeps > 0) {
    b.stack = fine_tune(b.stack, images, cfg.model.finetune_learning_rate,
                        cfg.model.finetune_sweeps, stack_rng, cfg.model.finetune_minibatch);
    say(progress, tag + ": fine-tuning done");
  }
  b.reconstruction_error = reconstruction_error(b.stack, images);

  const std::size_t n_actions = world.env.n_actions();
  std::vector<std::vector<LatentPair>> pairs(n_actions);
  for (const auto& t : data.transitions)
    pairs[t.action].push_back({encode(b.stack, t.observation), encode(b.stack, t.observation_next)});

  const CdConfig cd = cfg.model.temporal_cd();
  std::vector<TemporalModel> models(n_actions);
  std::vector<std::vector<TvCheckpoint>> checkpoints(n_actions);
  Workers{cfg.workers}.for_each(n_actions, [&](std::size_t a) {
    if (!(!pairs[a].empty())) fail("train_world_model: no transitions for action " + std::to_string(a));
    const std::string atag = tag + "/temporal/" + std::to_string(a);
    Rng rng(derive_seed(cfg.seed, atag));
    TemporalModel m;
    m.action = a;
    m.sampling = cfg.model.sampling();
    m.rbm = RbmParams::random(2 * b.stack.code_size(), cfg.model.temporal_hidden, rng,
                              cfg.model.init_stddev);
    auto checkpoint = [&](std::size_t epoch, const RbmParams& rbm) {
      if (epoch % cfg.model.checkpoint_every != 0 && epoch != cd.epochs) return;
      TemporalModel snapshot = m;
      snapshot.rbm = rbm;
      const double tv = kernel_tv_for_action(
          cfg, world, b.stack, snapshot, a,
          derive_seed(cfg.seed, atag + "/tv/" + std::to_string(epoch)));
      checkpoints[a].push_back({a, epoch, tv});
    };
    checkpoint(0, m.rbm);
    continue_temporal(m, pairs[a], cd, rng, checkpoint);
    models[a] = std::move(m);
  });
  for (std::size_t a = 0; a < n_actions; ++a) {
    b.temporal.models.push_back(std::move(models[a]));
    for (const auto& c : checkpoints[a]) b.checkpoints.push_back(c);
    if (!checkpoints[a].empty())
      say(progress, tag + ": action " + std::to_string(a) + " kernel TV " +
                        format_double(checkpoints[a].front().kernel_tv) + " -> " +
                        format_double(checkpoints[a].back().kernel_tv));
  }

  std::vector<Vector> arrived;
  std::vector<double> rewards;
  std::vector<FeatureTransition> features;
  for (const auto& t : data.transitions) {
    arrived.push_back(t.observation_next);
    rewards.push_back(t.reward);
    features.push_back({t.observation, t.action, t.reward, t.observation_next});
  }
  b.reward = train_reward_model(arrived, rewards, cfg.model.reward_learning_rate,
                                cfg.model.reward_iterations);
  b.linear = train_linear(features, n_actions, cfg.model.linear_learning_rate,
                          cfg.model.linear_sweeps);

  if (n_actions == 1) {
    Rng rng(derive_seed(cfg.seed, tag + "/classifier"));
    std::vector<std::size_t> sizes{world.map.dim()};
    for (auto h : cfg.model.classifier_hidden) sizes.push_back(h);
    sizes.push_back(world.env.n_states);
    std::vector<Vector> inputs;
    std::vector<std::size_t> labels;
    for (std::size_t s = 0; s < world.map.n_states(); ++s)
      for (const auto& x : world.map.pools[s]) {
        inputs.push_back(x);
        labels.push_back(s);
      }
    b.classifier = train_classifier(ClassifierHead::create(sizes, rng), inputs, labels,
                                    cfg.model.classifier_learning_rate,
                                    cfg.model.classifier_momentum, cfg.model.classifier_sweeps,
                                    rng);
  }
  return b;
}

AgentKind parse_agent_kind(const std::string& name) {
  if (name == "model-free") return AgentKind::model_free;
  if (name == "dyna-generative") return AgentKind::dyna_generative;
  if (name == "dyna-linear") return AgentKind::dyna_linear;
  if (name == "dyna-oracle") return AgentKind::dyna_oracle;
  throw ConfigError("config: unknown agent '" + name +
                    "' (model-free | dyna-generative | dyna-linear | dyna-oracle)");
}

const char* to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::model_free: return "model-free";
    case AgentKind::dyna_generative: return "dyna-generative";
    case AgentKind::dyna_linear: return "dyna-linear";
    case AgentKind::dyna_oracle: return "dyna-oracle";
  }
  return "unknown";
}

std::unique_ptr<WorldModel> make_world_model(AgentKind kind, const World& world,
                                             const WorldModelBundle& bundle) {
  const bool episodic = std::any_of(world.env.terminal.begin(), world.env.terminal.end(),
                                    [](bool t) { return t; });
  switch (kind) {
    case AgentKind::model_free: return nullptr;
    case AgentKind::dyna_oracle: return std::make_unique<OracleWorldModel>(world.env, world.map);
    case AgentKind::dyna_generative:
      return std::make_unique<GenerativeWorldModel>(
          bundle.stack, bundle.temporal, world.env.n_actions(),
          world.kind == EnvKind::chain ? nearest_class_outcome(world.env, world.map)
                                       : reward_model_outcome(bundle.reward, episodic));
    case AgentKind::dyna_linear:
      return std::make_unique<LinearWorldModel>(
          bundle.linear, episodic ? 0.5 : std::numeric_limits<double>::infinity());
  }
  return nullptr;
}

void Workers::for_each(std::size_t n, const std::function<void(std::size_t)>& fn) const {
  const std::size_t threads = std::min(std::max<std::size_t>(count, 1), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

fs::path stage_dir(const ExperimentConfig& cfg, const std::string& stage) {
  return fs::path(cfg.output_dir) / stage;
}

fs::path dataset_path(const ExperimentConfig& cfg, std::size_t index) {
  return stage_dir(cfg, "gen-data") / (indexed("dataset", index) + ".bin");
}

fs::path model_dir(const ExperimentConfig& cfg, std::size_t index) {
  return stage_dir(cfg, "train-model") / indexed("model", index);
}

WorldModelBundle load_world_model(const ExperimentConfig& cfg, std::size_t index) {
  const fs::path dir = model_dir(cfg, index);
  for (const char* f : {"stack.bin", "temporal.bin", "reward.bin", "linear.bin"})
    require_file(dir / f, "train-model");
  WorldModelBundle b;
  b.stack = load_dbn(dir / "stack.bin");
  b.temporal = load_temporal_set(dir / "temporal.bin");
  b.reward = load_reward(dir / "reward.bin");
  b.linear = load_linear(dir / "linear.bin");
  if (cfg.env.kind == EnvKind::chain) {
    require_file(dir / "classifier.bin", "train-model");
    b.classifier = load_classifier(dir / "classifier.bin");
  }
  return b;
}

void cmd_gen_data(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const World world = build_world(cfg);
  std::vector<fs::path> files;
  for (std::size_t i = 0; i < cfg.model.models; ++i) {
    const fs::path p = dataset_path(cfg, i);
    const std::uint64_t seed = derive_seed(cfg.seed, indexed("data", i));
    files.push_back(p);
    if (up_to_date(p, cfg, seed)) {
      say(progress, "gen-data: " + p.string() + " is up to date");
      continue;
    }
    save_model(p, generate_dataset(cfg, world, i), archive_info(cfg, seed));
    say(progress, "gen-data: wrote " + p.string());
  }
  write_manifest(cfg, "gen-data", files);
}

void cmd_train_model(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const World world = build_world(cfg);
  std::vector<fs::path> files;
  for (std::size_t i = 0; i < cfg.model.models; ++i) {
    require_file(dataset_path(cfg, i), "gen-data");
    const fs::path dir = model_dir(cfg, i);
    const std::uint64_t seed = derive_seed(cfg.seed, indexed("model", i));
    std::vector<fs::path> outputs = {dir / "stack.bin", dir / "temporal.bin", dir / "reward.bin",
                                     dir / "linear.bin"};
    if (cfg.env.kind == EnvKind::chain) outputs.push_back(dir / "classifier.bin");
    const fs::path tv_csv = dir / "tv-checkpoints.csv";
    files.insert(files.end(), outputs.begin(), outputs.end());
    files.push_back(tv_csv);
    if (fs::exists(tv_csv) && std::all_of(outputs.begin(), outputs.end(), [&](const fs::path& p) {
          return up_to_date(p, cfg, seed);
        })) {
      say(progress, "train-model: " + dir.string() + " is up to date");
      continue;
    }
    const Dataset data = load_dataset(dataset_path(cfg, i));
    WorldModelBundle b;
    try {
      b = train_world_model(cfg, world, data, i, progress);
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged("train-model: model " + std::to_string(i) + ": " + e.what() +
                                 "; completed archives in " + stage_dir(cfg, "train-model").string() +
                                 " are kept",
                             e.sweep());
    }
    const ArchiveInfo info = archive_info(cfg, seed);
    std::vector<std::vector<double>> rows;
    for (const auto& c : b.checkpoints)
      rows.push_back({static_cast<double>(c.action), static_cast<double>(c.epoch), c.kernel_tv});
    write_csv(tv_csv, {"action", "epoch", "kernel_tv"}, rows);
    save_model(dir / "stack.bin", b.stack, info);
    save_model(dir / "temporal.bin", b.temporal, info);
    save_model(dir / "reward.bin", b.reward, info);
    save_model(dir / "linear.bin", b.linear, info);
    if (b.classifier) save_model(dir / "classifier.bin", *b.classifier, info);
    say(progress, "train-model: wrote " + dir.string() + " (reconstruction error " +
                      format_double(b.reconstruction_error) + ")");
  }
  write_manifest(cfg, "train-model", files);
}

void cmd_run(const ExperimentConfig& cfg, AgentKind agent, const ProgressFn& progress) {
  cfg.validate();
  const World world = build_world(cfg);
  std::vector<fs::path> files;
  if (cfg.env.kind == EnvKind::chain)
    run_chain(cfg, world, agent, progress, files);
  else
    run_grid(cfg, world, agent, progress, files);

  // The manifest covers every agent run so far.
  const fs::path dir = stage_dir(cfg, "run");
  std::vector<fs::path> all;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") all.push_back(e.path());
  write_manifest(cfg, "run", all);
}

void cmd_eval(const ExperimentConfig& cfg, bool self_check, const ProgressFn& progress) {
  cfg.validate();
  const World world = build_world(cfg);
  const auto& env = world.env;
  const fs::path dir = stage_dir(cfg, "eval") / (self_check ? "self-check" : "models");
  fs::create_directories(dir);
  std::vector<fs::path> files;

  const Vector v_uniform = solve_exact_values(env, uniform_policy(env));
  const OptimalSolution opt = solve_optimal(env, cfg.eval.optimal_tolerance);
  {
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < env.n_states; ++s)
      rows.push_back({static_cast<double>(s), v_uniform[s], opt.values[s],
                      static_cast<double>(opt.policy[s])});
    const fs::path p = dir / "values.csv";
    write_csv(p, {"state", "v_uniform", "v_optimal", "optimal_action"}, rows);
    files.push_back(p);
  }

  const auto roots = non_terminal_states(env);
  const Matrix kernel = policy_kernel(env, uniform_policy(env));

  if (self_check) {
    std::vector<std::vector<double>> rows;
    for (std::size_t a = 0; a < env.n_actions(); ++a)
      rows.push_back({static_cast<double>(a),
                      mean_row_tv(env.transitions[a], env.transitions[a], roots)});
    const fs::path p = dir / "kernel-tv.csv";
    write_csv(p, {"action", "kernel_tv"}, rows);
    files.push_back(p);
    std::vector<std::vector<double>> krows;
    Matrix power = Matrix::identity(env.n_states);
    for (std::size_t k = 0; k <= cfg.eval.kstep_max; ++k) {
      krows.push_back({static_cast<double>(k), mean_row_tv(power, power, roots)});
      power = matmul(power, kernel);
    }
    const fs::path pk = dir / "kstep-tv.csv";
    write_csv(pk, {"k", "tv"}, krows);
    files.push_back(pk);
  } else {
    std::vector<std::vector<double>> tv_rows, kstep_rows, walk_rows;
    for (std::size_t m = 0; m < cfg.model.models; ++m) {
      const WorldModelBundle b = load_world_model(cfg, m);
      const NextObservationSampler gen = generative_sampler(b.stack, b.temporal);
      const NextObservationSampler lin = linear_sampler(b.linear);
      const std::string tag = indexed("eval/model", m);
      for (std::size_t a = 0; a < env.n_actions(); ++a) {
        const std::size_t acts[] = {a};
        Rng rg(derive_seed(cfg.seed, tag + "/kernel/generative/" + std::to_string(a)));
        Rng rl(derive_seed(cfg.seed, tag + "/kernel/linear/" + std::to_string(a)));
        const double tg = kernel_tv(
            empirical_kernel(gen, world.map, env, acts, cfg.eval.kernel_samples, rg), env, acts);
        const double tl = kernel_tv(
            empirical_kernel(lin, world.map, env, acts, cfg.eval.kernel_samples, rl), env, acts);
        tv_rows.push_back({static_cast<double>(m), static_cast<double>(a), tg, tl});
      }
      Rng kg(derive_seed(cfg.seed, tag + "/kstep/generative"));
      Rng kl(derive_seed(cfg.seed, tag + "/kstep/linear"));
      const auto g = kstep_tv(gen, env, world.map, cfg.eval.kstep_max, cfg.eval.kstep_trajectories, kg);
      const auto l = kstep_tv(lin, env, world.map, cfg.eval.kstep_max, cfg.eval.kstep_trajectories, kl);
      for (std::size_t k = 0; k < g.size(); ++k)
        kstep_rows.push_back({static_cast<double>(m), static_cast<double>(k), g[k], l[k]});

      Rng wr(derive_seed(cfg.seed, tag + "/walks"));
      for (std::size_t w = 0; w < cfg.eval.walks; ++w) {
        const std::size_t root = roots[w % roots.size()];
        std::vector<std::size_t> actions;
        for (std::size_t k = 0; k < cfg.eval.walk_length; ++k)
          actions.push_back(env.n_actions() == 1 ? 0 : wr.uniform_index(env.n_actions()));
        Vector xg = world.map.canonical(root), xl = xg;
        for (std::size_t k = 0; k < actions.size(); ++k) {
          xg = gen(xg, actions[k], wr);
          xl = lin(xl, actions[k], wr);
          walk_rows.push_back({static_cast<double>(m), static_cast<double>(w),
                               static_cast<double>(root), static_cast<double>(k + 1),
                               static_cast<double>(actions[k]),
                               static_cast<double>(nearest_class(xg, world.map.templates)),
                               static_cast<double>(nearest_class(xl, world.map.templates))});
        }
      }
      say(progress, "eval: model " + std::to_string(m) + " done");
    }
    const fs::path p1 = dir / "kernel-tv.csv";
    write_csv(p1, {"model", "action", "generative_tv", "linear_tv"}, tv_rows);
    const fs::path p2 = dir / "kstep-tv.csv";
    write_csv(p2, {"model", "k", "generative_tv", "linear_tv"}, kstep_rows);
    const fs::path p3 = dir / "walks.csv";
    write_csv(p3, {"model", "walk", "root", "step", "action", "generative_class", "linear_class"},
              walk_rows);
    files.insert(files.end(), {p1, p2, p3});
  }
  write_manifest(cfg, "eval", files);
}

}  // namespace deepdyna
