#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>

#include "deepdyna/io.hpp"
#include "doctest.h"

using namespace deepdyna;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("deepdyna-io-" + std::to_string(Rng(std::random_device{}()).next_u64()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ArchiveError::Code error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const ArchiveError& e) {
    return e.code();
  }
  FAIL("no ArchiveError thrown");
  return ArchiveError::Code::io;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("IDX fixture with two 2x2 images") {
  TempDir dir;
  const fs::path images = dir.path / "images.idx3";
  write_bytes(images, {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2,
                       0, 255, 51, 102, 255, 255, 0, 0});
  const IdxData d = load_idx(images);
  CHECK(d.dims == std::vector<std::uint32_t>{2, 2, 2});
  REQUIRE(d.items.size() == 2);
  CHECK(d.items[0] == Vector{0.0, 1.0, 0.2, 0.4});
  CHECK(d.items[1] == Vector{1.0, 1.0, 0.0, 0.0});

  const fs::path labels = dir.path / "labels.idx1";
  write_bytes(labels, {0, 0, 8, 1, 0, 0, 0, 3, 7, 0, 9});
  const IdxData l = load_idx(labels);
  CHECK(l.dims == std::vector<std::uint32_t>{3});
  CHECK(l.raw == std::vector<std::uint8_t>{7, 0, 9});

  const fs::path copy = dir.path / "copy.idx3";
  save_idx(copy, d.dims, d.raw);
  CHECK(read_bytes(copy) == read_bytes(images));
}

TEST_CASE("malformed IDX files are rejected") {
  TempDir dir;
  write_bytes(dir.path / "magic", {0, 0, 9, 1, 0, 0, 0, 1, 5});
  CHECK_THROWS(load_idx(dir.path / "magic"));
  write_bytes(dir.path / "short", {0, 0, 8, 1, 0, 0, 0, 4, 5});
  CHECK_THROWS(load_idx(dir.path / "short"));
  CHECK_THROWS(load_idx(dir.path / "missing"));
}

TEST_CASE("CSV round-trip keeps every bit") {
  TempDir dir;
  const fs::path p = dir.path / "t.csv";
  const std::vector<std::vector<double>> rows{{0.1, 1.0 / 3.0, -2.5e-300}, {1e17, 0.0, 42.0}};
  write_csv(p, {"a", "b", "c"}, rows);
  const CsvTable t = read_csv(p);
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  CHECK(t.rows == rows);
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("archive header and round-trip") {
  TempDir dir;
  Rng rng(1);
  const RbmParams rbm = RbmParams::random(5, 3, rng, 0.3);
  ArchiveInfo info;
  info.seed = 99;
  info.config_echo = "[experiment]\nseed = 99\n";
  save_model(dir.path / "rbm.bin", rbm, info);
  const ArchiveInfo back = read_archive_info(dir.path / "rbm.bin");
  CHECK(back.kind == ArchiveKind::rbm);
  CHECK(back.version == kArchiveVersion);
  CHECK(back.seed == 99);
  CHECK(back.config_echo == info.config_echo);
  CHECK(load_rbm(dir.path / "rbm.bin") == rbm);
  const auto bytes = read_bytes(dir.path / "rbm.bin");
  CHECK(std::string(bytes.begin(), bytes.begin() + 7) == "DDYNARC");
}

TEST_CASE("archive errors carry a code") {
  TempDir dir;
  Rng rng(2);
  const fs::path p = dir.path / "rbm.bin";
  save_model(p, RbmParams::random(4, 2, rng), {});
  auto bytes = read_bytes(p);

  CHECK(error_code([&] { load_linear(p); }) == ArchiveError::Code::kind_mismatch);
  CHECK(error_code([&] { load_rbm(dir.path / "missing.bin"); }) == ArchiveError::Code::io);

  auto cut = bytes;
  cut.resize(cut.size() - 5);
  write_bytes(dir.path / "cut.bin", cut);
  CHECK(error_code([&] { load_rbm(dir.path / "cut.bin"); }) == ArchiveError::Code::truncated);

  auto magic = bytes;
  magic[0] = 'X';
  write_bytes(dir.path / "magic.bin", magic);
  CHECK(error_code([&] { load_rbm(dir.path / "magic.bin"); }) == ArchiveError::Code::bad_magic);

  auto version = bytes;
  version[8] = 0x7f;
  write_bytes(dir.path / "version.bin", version);
  CHECK(error_code([&] { load_rbm(dir.path / "version.bin"); }) == ArchiveError::Code::version_mismatch);
}

TEST_CASE("special doubles survive an archive") {
  TempDir dir;
  RewardModel m{Vector{-0.0, std::numeric_limits<double>::denorm_min(), 1e308}, -1.5};
  save_model(dir.path / "r.bin", m, {});
  const RewardModel back = load_reward(dir.path / "r.bin");
  CHECK(back == m);
  CHECK(std::signbit(back.weights[0]));
}

}
