#include <filesystem>

#include "deepdyna/config.hpp"
#include "doctest.h"

using namespace deepdyna;

TEST_SUITE("config") {

TEST_CASE("every preset renders and parses back unchanged") {
  const auto names = preset_names();
  CHECK(names.size() == 4);
  for (const auto& name : names) {
    const ExperimentConfig cfg = preset(name);
    if (cfg.observations.source == ObservationSource::synthetic) CHECK_NOTHROW(cfg.validate());
    CHECK(parse_config(render_config(cfg)) == cfg);
    CHECK(config_hash(cfg).size() == 16);
  }
  CHECK_THROWS(preset("nope"));
}

TEST_CASE("hash follows the content") {
  ExperimentConfig a = preset("desk-chain");
  ExperimentConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("partial files keep defaults and broadcast lists") {
  const ExperimentConfig cfg = parse_config(
      "[experiment]\nseed = 5\n\n[model]\nhidden_sizes = 20, 10, 5\nlayer_epochs = 7\n");
  CHECK(cfg.seed == 5);
  CHECK(cfg.model.hidden_sizes == std::vector<std::size_t>{20, 10, 5});
  const TrainSchedule s = cfg.model.schedule(64);
  CHECK(s.layer_configs.size() == 3);
  for (const auto& c : s.layer_configs) CHECK(c.epochs == 7);
  CHECK(cfg.env == EnvSection{});
}

TEST_CASE("unknown names and bad values are rejected") {
  CHECK_THROWS_AS(parse_config("[experiment]\nsed = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nowhere]\nseed = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[env]\nkind = torus\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[data]\nsteps = many\n"), ConfigError);
  ExperimentConfig cfg = preset("desk-grid");
  cfg.env.gamma = 1.0;
  CHECK_THROWS(cfg.validate());
  cfg = preset("desk-grid");
  cfg.model.layer_epochs = {1, 2, 3};
  CHECK_THROWS(cfg.validate());
  cfg = preset("desk-chain");
  cfg.observations.source = ObservationSource::idx;
  cfg.observations.idx_images = "/nonexistent/images";
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("files round-trip") {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "deepdyna-config-test.ini";
  const ExperimentConfig cfg = preset("full-grid");
  save_config(p, cfg);
  CHECK(load_config(p) == cfg);
  fs::remove(p);
  CHECK_THROWS(load_config(p));
}

}
