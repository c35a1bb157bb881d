#include "deepdyna/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "deepdyna/io.hpp"

namespace deepdyna {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw ConfigError("config: " + key + " = '" + value + "' is not " + what);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T x{};
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end || text.empty())
    bad_value(key, text, std::is_floating_point_v<T> ? "a number" : "a non-negative integer");
  return x;
}

template <class E>
struct EnumNames;
template <>
struct EnumNames<EnvKind> {
  static constexpr std::pair<EnvKind, const char*> table[] = {{EnvKind::chain, "chain"},
                                                              {EnvKind::grid, "grid"}};
};
template <>
struct EnumNames<ObservationSource> {
  static constexpr std::pair<ObservationSource, const char*> table[] = {
      {ObservationSource::synthetic, "synthetic"}, {ObservationSource::idx, "idx"}};
};
template <>
struct EnumNames<StackData> {
  static constexpr std::pair<StackData, const char*> table[] = {
      {StackData::transitions, "transitions"}, {StackData::states, "states"}};
};
template <>
struct EnumNames<VisibleFamily> {
  static constexpr std::pair<VisibleFamily, const char*> table[] = {
      {VisibleFamily::binary, "binary"}, {VisibleFamily::gaussian, "gaussian"}};
};
template <>
struct EnumNames<ClampMode> {
  static constexpr std::pair<ClampMode, const char*> table[] = {{ClampMode::sample, "sample"},
                                                                {ClampMode::threshold, "threshold"}};
};

template <class T>
std::string to_text(const T& v) {
  if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, double>) {
    return format_double(v);
  } else if constexpr (std::is_enum_v<T>) {
    for (const auto& [e, name] : EnumNames<T>::table)
      if (e == v) return name;
    return "?";
  } else if constexpr (std::is_integral_v<T>) {
    return std::to_string(v);
  } else {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ", ";
      out += to_text(v[i]);
    }
    return out;
  }
}

template <class T>
void from_text(const std::string& key, const std::string& text, T& out) {
  if constexpr (std::is_same_v<T, std::string>) {
    out = text;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (text == "true") out = true;
    else if (text == "false") out = false;
    else bad_value(key, text, "true or false");
  } else if constexpr (std::is_enum_v<T>) {
    for (const auto& [e, name] : EnumNames<T>::table)
      if (text == name) {
        out = e;
        return;
      }
    std::string names;
    for (const auto& [e, name] : EnumNames<T>::table) names += std::string(names.empty() ? "" : " | ") + name;
    throw ConfigError("config: " + key + " = '" + text + "' must be one of " + names);
  } else if constexpr (std::is_arithmetic_v<T>) {
    out = parse_number<T>(key, text);
  } else {
    T values;
    for (const auto& item : split_list(text)) {
      typename T::value_type x{};
      from_text(key, item, x);
      values.push_back(x);
    }
    out = std::move(values);
  }
}

/// Every config field with its section and key, in file order.
template <class C, class F>
void visit_fields(C& c, F&& f) {
  f("experiment", "name", c.name);
  f("experiment", "seed", c.seed);
  f("experiment", "output_dir", c.output_dir);
  f("experiment", "workers", c.workers);

  f("env", "kind", c.env.kind);
  f("env", "states", c.env.states);
  f("env", "p_advance", c.env.p_advance);
  f("env", "reward_state", c.env.reward_state);
  f("env", "rows", c.env.rows);
  f("env", "cols", c.env.cols);
  f("env", "p_success", c.env.p_success);
  f("env", "reward_row", c.env.reward_row);
  f("env", "gamma", c.env.gamma);

  f("observations", "source", c.observations.source);
  f("observations", "side", c.observations.side);
  f("observations", "variants", c.observations.variants);
  f("observations", "noise", c.observations.noise);
  f("observations", "idx_images", c.observations.idx_images);
  f("observations", "idx_labels", c.observations.idx_labels);
  f("observations", "idx_per_class", c.observations.idx_per_class);

  f("data", "steps", c.data.steps);

  auto& m = c.model;
  f("model", "hidden_sizes", m.hidden_sizes);
  f("model", "stack_data", m.stack_data);
  f("model", "bottom_family", m.bottom_family);
  f("model", "layer_epochs", m.layer_epochs);
  f("model", "layer_learning_rates", m.layer_learning_rates);
  f("model", "layer_cd_k", m.layer_cd_k);
  f("model", "layer_minibatch", m.layer_minibatch);
  f("model", "momentum", m.momentum);
  f("model", "deterministic", m.deterministic);
  f("model", "init_stddev", m.init_stddev);
  f("model", "finetune_learning_rate", m.finetune_learning_rate);
  f("model", "finetune_sweeps", m.finetune_sweeps);
  f("model", "finetune_minibatch", m.finetune_minibatch);
  f("model", "temporal_hidden", m.temporal_hidden);
  f("model", "temporal_cd_k", m.temporal_cd_k);
  f("model", "temporal_learning_rate", m.temporal_learning_rate);
  f("model", "temporal_momentum", m.temporal_momentum);
  f("model", "temporal_epochs", m.temporal_epochs);
  f("model", "temporal_minibatch", m.temporal_minibatch);
  f("model", "gibbs_steps", m.gibbs_steps);
  f("model", "clamp", m.clamp);
  f("model", "checkpoint_every", m.checkpoint_every);
  f("model", "tv_samples", m.tv_samples);
  f("model", "reward_learning_rate", m.reward_learning_rate);
  f("model", "reward_iterations", m.reward_iterations);
  f("model", "linear_learning_rate", m.linear_learning_rate);
  f("model", "linear_sweeps", m.linear_sweeps);
  f("model", "classifier_hidden", m.classifier_hidden);
  f("model", "classifier_learning_rate", m.classifier_learning_rate);
  f("model", "classifier_momentum", m.classifier_momentum);
  f("model", "classifier_sweeps", m.classifier_sweeps);
  f("model", "models", m.models);

  auto& a = c.agent;
  f("agent", "alpha", a.alpha);
  f("agent", "alpha_sim", a.alpha_sim);
  f("agent", "alpha_sim_decay", a.alpha_sim_decay);
  f("agent", "alpha_sim_floor", a.alpha_sim_floor);
  f("agent", "epsilon", a.epsilon);
  f("agent", "epsilon_decay", a.epsilon_decay);
  f("agent", "epsilon_floor", a.epsilon_floor);
  f("agent", "K", a.K);
  f("agent", "episodes", a.episodes);
  f("agent", "max_episode_steps", a.max_episode_steps);
  f("agent", "runs_per_model", a.runs_per_model);
  f("agent", "baseline_runs", a.baseline_runs);
  f("agent", "td_alpha_tabular", a.td_alpha_tabular);
  f("agent", "td_updates_tabular", a.td_updates_tabular);
  f("agent", "td_alpha_linear", a.td_alpha_linear);
  f("agent", "td_updates_linear", a.td_updates_linear);
  f("agent", "td_checkpoint_every", a.td_checkpoint_every);

  f("eval", "kstep_max", c.eval.kstep_max);
  f("eval", "kstep_trajectories", c.eval.kstep_trajectories);
  f("eval", "kernel_samples", c.eval.kernel_samples);
  f("eval", "walks", c.eval.walks);
  f("eval", "walk_length", c.eval.walk_length);
  f("eval", "optimal_tolerance", c.eval.optimal_tolerance);
}

template <class T>
T layer_value(const std::vector<T>& list, std::size_t layer) {
  return list.size() == 1 ? list.front() : list.at(layer);
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("config: " + msg);
}

}  // namespace

TrainSchedule ModelSection::schedule(std::size_t input_size) const {
  (void)input_size;
  TrainSchedule s;
  s.hidden_sizes = hidden_sizes;
  s.bottom_family = bottom_family;
  s.init_stddev = init_stddev;
  s.finetune_learning_rate = finetune_learning_rate;
  s.finetune_sweeps = finetune_sweeps;
  s.finetune_minibatch = finetune_minibatch;
  for (std::size_t l = 0; l < hidden_sizes.size(); ++l) {
    CdConfig cd;
    cd.k = layer_value(layer_cd_k, l);
    cd.learning_rate = layer_value(layer_learning_rates, l);
    cd.momentum = momentum;
    cd.epochs = layer_value(layer_epochs, l);
    cd.minibatch_size = layer_value(layer_minibatch, l);
    cd.deterministic_activations = deterministic;
    s.layer_configs.push_back(cd);
  }
  return s;
}

CdConfig ModelSection::temporal_cd() const {
  CdConfig cd;
  cd.k = temporal_cd_k;
  cd.learning_rate = temporal_learning_rate;
  cd.momentum = temporal_momentum;
  cd.epochs = temporal_epochs;
  cd.minibatch_size = temporal_minibatch;
  return cd;
}

SamplingConfig ModelSection::sampling() const {
  SamplingConfig s;
  s.gibbs_steps = gibbs_steps;
  s.clamp = clamp;
  return s;
}

AgentConfig AgentSection::agent_config(double gamma) const {
  AgentConfig a;
  a.alpha = alpha;
  a.alpha_sim = alpha_sim;
  a.alpha_sim_decay = alpha_sim_decay;
  a.alpha_sim_floor = alpha_sim_floor;
  a.gamma = gamma;
  a.epsilon = epsilon;
  a.epsilon_decay = epsilon_decay;
  a.epsilon_floor = epsilon_floor;
  a.K = K;
  a.max_episode_steps = max_episode_steps;
  return a;
}

void ExperimentConfig::validate() const {
  check(!name.empty(), "experiment.name must not be empty");
  check(!output_dir.empty(), "experiment.output_dir must not be empty");
  check(workers >= 1, "experiment.workers must be at least 1");

  check(env.gamma > 0.0 && env.gamma < 1.0, "env.gamma must lie in (0,1)");
  if (env.kind == EnvKind::chain) {
    check(env.states >= 2, "env.states must be at least 2");
    check(env.p_advance > 0.0 && env.p_advance <= 1.0, "env.p_advance must lie in (0,1]");
    check(env.reward_state < env.states, "env.reward_state must be a state id");
  } else {
    check(env.rows * env.cols >= 2, "env.rows * env.cols must be at least 2");
    check(env.p_success >= 0.0 && env.p_success <= 1.0, "env.p_success must lie in [0,1]");
    check(env.reward_row < env.rows, "env.reward_row must be a row index");
    check(env.reward_row != 0, "env.reward_row must not contain the start state (row 0)");
  }

  if (observations.source == ObservationSource::synthetic) {
    check(observations.side >= 4, "observations.side must be at least 4");
    check(observations.variants >= 1, "observations.variants must be at least 1");
    check(observations.noise >= 0.0 && observations.noise <= 0.5,
          "observations.noise must lie in [0,0.5]");
  } else {
    check(!observations.idx_images.empty() && !observations.idx_labels.empty(),
          "observations.idx_images and observations.idx_labels are required for idx source");
    check(std::filesystem::exists(observations.idx_images),
          "observations.idx_images file '" + observations.idx_images + "' does not exist");
    check(std::filesystem::exists(observations.idx_labels),
          "observations.idx_labels file '" + observations.idx_labels + "' does not exist");
  }

  check(data.steps >= 1, "data.steps must be at least 1");

  const auto& m = model;
  check(!m.hidden_sizes.empty(), "model.hidden_sizes must list at least one layer");
  for (auto h : m.hidden_sizes) check(h >= 1, "model.hidden_sizes entries must be positive");
  auto list_ok = [&](std::size_t n, const char* key) {
    check(n == 1 || n == m.hidden_sizes.size(),
          std::string("model.") + key + " needs one entry or one per hidden layer");
  };
  list_ok(m.layer_epochs.size(), "layer_epochs");
  list_ok(m.layer_learning_rates.size(), "layer_learning_rates");
  list_ok(m.layer_cd_k.size(), "layer_cd_k");
  list_ok(m.layer_minibatch.size(), "layer_minibatch");
  for (double lr : m.layer_learning_rates) check(lr > 0.0, "model.layer_learning_rates must be positive");
  for (auto k : m.layer_cd_k) check(k >= 1, "model.layer_cd_k entries must be at least 1");
  for (auto b : m.layer_minibatch) check(b >= 1, "model.layer_minibatch entries must be at least 1");
  check(m.momentum >= 0.0 && m.momentum < 1.0, "model.momentum must lie in [0,1)");
  check(m.init_stddev > 0.0, "model.init_stddev must be positive");
  check(m.finetune_learning_rate > 0.0, "model.finetune_learning_rate must be positive");
  check(m.finetune_minibatch >= 1, "model.finetune_minibatch must be at least 1");
  check(m.temporal_hidden >= 1, "model.temporal_hidden must be at least 1");
  check(m.temporal_cd_k >= 1, "model.temporal_cd_k must be at least 1");
  check(m.temporal_learning_rate > 0.0, "model.temporal_learning_rate must be positive");
  check(m.temporal_momentum >= 0.0 && m.temporal_momentum < 1.0,
        "model.temporal_momentum must lie in [0,1)");
  check(m.temporal_minibatch >= 1, "model.temporal_minibatch must be at least 1");
  check(m.gibbs_steps >= 1, "model.gibbs_steps must be at least 1");
  check(m.checkpoint_every >= 1, "model.checkpoint_every must be at least 1");
  check(m.tv_samples >= 1, "model.tv_samples must be at least 1");
  check(m.reward_learning_rate > 0.0, "model.reward_learning_rate must be positive");
  check(m.linear_learning_rate > 0.0, "model.linear_learning_rate must be positive");
  check(m.classifier_learning_rate > 0.0, "model.classifier_learning_rate must be positive");
  check(m.classifier_momentum >= 0.0 && m.classifier_momentum < 1.0,
        "model.classifier_momentum must lie in [0,1)");
  check(m.models >= 1, "model.models must be at least 1");

  try {
    agent.agent_config(env.gamma).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check(agent.episodes >= 1, "agent.episodes must be at least 1");
  check(agent.runs_per_model >= 1, "agent.runs_per_model must be at least 1");
  check(agent.baseline_runs >= 1, "agent.baseline_runs must be at least 1");
  check(agent.td_alpha_tabular > 0.0 && agent.td_alpha_linear > 0.0,
        "agent TD step sizes must be positive");
  check(agent.td_checkpoint_every >= 1, "agent.td_checkpoint_every must be at least 1");

  check(eval.kstep_max >= 1, "eval.kstep_max must be at least 1");
  check(eval.kstep_trajectories >= 1, "eval.kstep_trajectories must be at least 1");
  check(eval.kernel_samples >= 1, "eval.kernel_samples must be at least 1");
  check(eval.walk_length >= 1, "eval.walk_length must be at least 1");
  check(eval.optimal_tolerance > 0.0, "eval.optimal_tolerance must be positive");
}

ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  ExperimentConfig cfg;
  std::set<std::string> known;
  visit_fields(cfg, [&](const char* section, const char* key, auto& field) {
    const std::string path = std::string(section) + "." + key;
    known.insert(path);
    if (auto v = tree.get_optional<std::string>(boost::property_tree::ptree::path_type(path, '.')))
      from_text(path, trim(*v), field);
  });
  for (const auto& [section, entries] : tree) {
    if (entries.empty())
      throw ConfigError("config: key '" + section + "' appears outside any section");
    for (const auto& [key, value] : entries)
      if (!known.count(section + "." + key))
        throw ConfigError("config: unknown key '" + key + "' in section [" + section + "]");
  }
  return cfg;
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  std::string current;
  visit_fields(cfg, [&](const char* section, const char* key, const auto& field) {
    if (current != section) {
      if (!current.empty()) out += '\n';
      out += '[' + std::string(section) + "]\n";
      current = section;
    }
    out += std::string(key) + " = " + to_text(field) + '\n';
  });
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("config: cannot write " + path.string());
  out << render_config(cfg);
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : render_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> preset_names() {
  return {"desk-chain", "desk-grid", "full-chain", "full-grid"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.output_dir = "out/" + name;

  if (name == "desk-chain" || name == "full-chain") {
    c.env.kind = EnvKind::chain;
    c.env.states = 10;
    c.env.p_advance = 0.8;
    c.env.reward_state = 9;
    c.env.gamma = 0.9;
    c.data.steps = 1000;
    c.agent.td_alpha_tabular = 0.02;
    c.agent.td_updates_tabular = 400000;
    c.agent.td_alpha_linear = 0.01;
    c.agent.td_updates_linear = 1000000;
    c.agent.K = 5;
    c.agent.alpha_sim = 0.02;
    c.eval.kstep_max = 20;
  } else if (name == "desk-grid" || name == "full-grid") {
    c.env.kind = EnvKind::grid;
    c.env.p_success = 0.9;
    c.env.gamma = 0.9;
    c.agent.alpha = 0.001;
    c.agent.alpha_sim = 0.001;
    c.agent.alpha_sim_decay = 0.95;
    c.agent.alpha_sim_floor = 0.0001;
    c.agent.epsilon = 0.9;
    c.agent.epsilon_decay = 0.9;
    c.agent.epsilon_floor = 0.05;
    c.eval.kstep_max = 20;
  } else {
    throw ConfigError("config: unknown preset '" + name + "'");
  }

  auto& m = c.model;
  if (name == "desk-chain") {
    c.observations = {ObservationSource::synthetic, 8, 1, 0.0, "", "", 0};
    m.hidden_sizes = {32, 16};
    m.stack_data = StackData::states;
    m.layer_epochs = {2000};
    m.layer_learning_rates = {0.1};
    m.layer_cd_k = {5};
    m.layer_minibatch = {10};
    m.momentum = 0.5;
    m.deterministic = true;
    m.finetune_learning_rate = 0.01;
    m.finetune_sweeps = 0;
    m.temporal_hidden = 64;
    m.temporal_cd_k = 5;
    m.temporal_learning_rate = 0.05;
    m.temporal_momentum = 0.5;
    m.temporal_epochs = 200;
    m.temporal_minibatch = 100;
    m.gibbs_steps = 20;
    m.clamp = ClampMode::threshold;
    m.checkpoint_every = 50;
    m.classifier_hidden = {32};
    m.classifier_learning_rate = 0.1;
    m.classifier_momentum = 0.5;
    m.classifier_sweeps = 20;
    c.agent.td_checkpoint_every = 10000;
    c.eval.kstep_trajectories = 500;
    c.eval.kernel_samples = 50;
  } else if (name == "desk-grid") {
    c.env.rows = 8;
    c.env.cols = 6;
    c.env.reward_row = 7;
    c.observations = {ObservationSource::synthetic, 8, 1, 0.0, "", "", 0};
    c.data.steps = 5000;
    m.hidden_sizes = {32, 16};
    m.stack_data = StackData::states;
    m.layer_epochs = {2000};
    m.layer_learning_rates = {0.1};
    m.layer_cd_k = {5};
    m.layer_minibatch = {10};
    m.momentum = 0.5;
    m.deterministic = true;
    m.temporal_hidden = 64;
    m.temporal_cd_k = 5;
    m.temporal_learning_rate = 0.05;
    m.temporal_momentum = 0.5;
    m.temporal_epochs = 300;
    m.temporal_minibatch = 50;
    m.gibbs_steps = 20;
    m.checkpoint_every = 50;
    m.tv_samples = 20;
    m.reward_learning_rate = 0.5;
    m.reward_iterations = 20000;
    m.linear_learning_rate = 0.01;
    m.linear_sweeps = 5;
    m.models = 5;
    c.agent.K = 10;
    c.agent.episodes = 400;
    c.agent.max_episode_steps = 500;
    c.agent.runs_per_model = 4;
    c.agent.baseline_runs = 20;
    c.eval.kernel_samples = 20;
    c.eval.walk_length = 10;
  } else if (name == "full-chain") {
    c.observations = {ObservationSource::idx, 28, 0, 0.0, "data/train-images-idx3-ubyte",
                      "data/train-labels-idx1-ubyte", 0};
    m.hidden_sizes = {500, 500, 200, 100};
    m.layer_epochs = {2000, 1000, 3000, 5000};
    m.layer_learning_rates = {0.005};
    m.layer_cd_k = {10};
    m.layer_minibatch = {50};  // 1000 transitions in 20 minibatches
    m.momentum = 0.9;
    m.finetune_learning_rate = 0.01;
    m.finetune_sweeps = 20000;
    m.temporal_hidden = 1000;
    m.temporal_cd_k = 20;
    m.temporal_learning_rate = 0.005;
    m.temporal_momentum = 0.9;
    m.temporal_epochs = 3000;
    m.temporal_minibatch = 100;  // 10 sequential minibatches
    m.gibbs_steps = 5000;
    m.checkpoint_every = 150;
    m.classifier_hidden = {500, 150};
    m.classifier_learning_rate = 0.1;
    m.classifier_momentum = 0.5;
    m.classifier_sweeps = 2500;
    c.eval.kstep_trajectories = 100;
  } else {  // full-grid
    c.env.rows = 5;
    c.env.cols = 18;
    c.env.reward_row = 4;
    c.observations = {ObservationSource::synthetic, 32, 1, 0.0, "", "", 0};
    c.data.steps = 7200;
    m.hidden_sizes = {4000, 2000, 1000, 200, 100};
    m.stack_data = StackData::states;
    m.bottom_family = VisibleFamily::gaussian;
    m.layer_epochs = {20000, 40000, 20000, 20000, 200000};
    m.layer_learning_rates = {0.00001, 0.001, 0.001, 0.001, 0.004};
    m.layer_cd_k = {5};
    m.layer_minibatch = {10, 90, 90, 90, 90};  // nine batches of ten, then one batch
    m.momentum = 0.0;
    m.deterministic = true;
    m.temporal_hidden = 500;
    m.temporal_cd_k = 5;
    m.temporal_learning_rate = 0.005;
    m.temporal_momentum = 0.0;
    m.temporal_epochs = 2000;
    m.temporal_minibatch = 900;  // two batches of 900 samples
    m.gibbs_steps = 50;
    m.checkpoint_every = 150;
    m.reward_learning_rate = 0.0001;
    m.reward_iterations = 100000;
    m.linear_learning_rate = 0.001;
    m.linear_sweeps = 5;
    m.models = 5;
    c.agent.K = 50;
    c.agent.episodes = 100;
    c.agent.runs_per_model = 10;
    c.agent.baseline_runs = 50;
    c.eval.kernel_samples = 20;
  }
  return c;
}

}  // namespace deepdyna
