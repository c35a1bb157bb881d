#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "deepdyna/agents.hpp"
#include "deepdyna/dbn.hpp"
#include "deepdyna/envs.hpp"
#include "deepdyna/linear_model.hpp"
#include "deepdyna/rbm.hpp"
#include "deepdyna/temporal.hpp"

namespace deepdyna {

// Archive layout (all integers little-endian, doubles as IEEE-754 bit patterns):
//   8 bytes  magic "DDYNARC\0"
//   u32      format version
//   u32      component kind
//   u64      creation seed
//   str      training-config echo (u64 length + bytes)
//   ...      kind-specific dimension header followed by the parameter payload
inline constexpr std::uint32_t kArchiveVersion = 1;

enum class ArchiveKind : std::uint32_t {
  rbm = 1,
  dbn = 2,
  temporal_set = 3,
  linear = 4,
  classifier = 5,
  reward = 6,
  dataset = 7,
};

const char* to_string(ArchiveKind kind);

class ArchiveError : public std::runtime_error {
 public:
  enum class Code { io, bad_magic, version_mismatch, kind_mismatch, truncated, dimension_mismatch };
  ArchiveError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct ArchiveInfo {
  ArchiveKind kind = ArchiveKind::rbm;
  std::uint32_t version = kArchiveVersion;
  std::uint64_t seed = 0;
  std::string config_echo;
};

/// Reads only the archive header.
ArchiveInfo read_archive_info(const std::filesystem::path& path);

void save_model(const std::filesystem::path& path, const RbmParams& rbm, const ArchiveInfo& info = {});
void save_model(const std::filesystem::path& path, const DbnStack& stack, const ArchiveInfo& info = {});
void save_model(const std::filesystem::path& path, const TemporalModelSet& set,
                const ArchiveInfo& info = {});
void save_model(const std::filesystem::path& path, const LinearExpectationModel& model,
                const ArchiveInfo& info = {});
void save_model(const std::filesystem::path& path, const ClassifierHead& head,
                const ArchiveInfo& info = {});
void save_model(const std::filesystem::path& path, const RewardModel& model,
                const ArchiveInfo& info = {});

/// Transition dataset together with the observation map that produced it.
struct Dataset {
  ObservationMap observations;
  std::vector<Transition> transitions;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};
void save_model(const std::filesystem::path& path, const Dataset& dataset,
                const ArchiveInfo& info = {});

RbmParams load_rbm(const std::filesystem::path& path, ArchiveInfo* info = nullptr);
DbnStack load_dbn(const std::filesystem::path& path, ArchiveInfo* info = nullptr);
TemporalModelSet load_temporal_set(const std::filesystem::path& path, ArchiveInfo* info = nullptr);
LinearExpectationModel load_linear(const std::filesystem::path& path, ArchiveInfo* info = nullptr);
ClassifierHead load_classifier(const std::filesystem::path& path, ArchiveInfo* info = nullptr);
RewardModel load_reward(const std::filesystem::path& path, ArchiveInfo* info = nullptr);
Dataset load_dataset(const std::filesystem::path& path, ArchiveInfo* info = nullptr);

/// IDX file contents: dimension sizes and one item per leading index.
struct IdxData {
  std::vector<std::uint32_t> dims;
  std::vector<Vector> items;  // unsigned bytes scaled to [0,1]
  std::vector<std::uint8_t> raw;
};

/// Parses an unsigned-byte IDX file (magic 0x00 0x00 0x08 <ndims>).
IdxData load_idx(const std::filesystem::path& path);
void save_idx(const std::filesystem::path& path, const std::vector<std::uint32_t>& dims,
              const std::vector<std::uint8_t>& payload);

/// Comma-separated, header first, doubles at 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

std::string format_double(double x);

}  // namespace deepdyna
