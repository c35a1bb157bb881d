#include "deepdyna/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace deepdyna {

namespace {

constexpr char kMagic[8] = {'D', 'D', 'Y', 'N', 'A', 'R', 'C', '\0'};

class Writer {
 public:
  void u8(std::uint8_t x) { buf_.push_back(static_cast<char>(x)); }
  void u32(std::uint32_t x) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(x >> (8 * i)));
  }
  void u64(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(x >> (8 * i)));
  }
  void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
  void str(const std::string& s) {
    u64(s.size());
    buf_.append(s);
  }
  void vec(std::span<const double> v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void mat(const Matrix& m) {
    u64(m.rows());
    u64(m.cols());
    for (double x : m.entries()) f64(x);
  }
  void raw(const char* p, std::size_t n) { buf_.append(p, n); }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= std::uint32_t{static_cast<std::uint8_t>(data_[pos_++])} << (8 * i);
    return x;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= std::uint64_t{static_cast<std::uint8_t>(data_[pos_++])} << (8 * i);
    return x;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    std::uint64_t n = u64();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Vector vec() {
    std::uint64_t n = u64();
    need(n * 8);
    Vector v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  Matrix mat() {
    std::uint64_t r = u64(), c = u64();
    if (c != 0 && r > remaining() / 8 / c) truncated();
    Matrix m(r, c);
    for (double& x : m.entries()) x = f64();
    return m;
  }
  void raw(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }
  void expect_end() const {
    if (pos_ != data_.size())
      throw ArchiveError(ArchiveError::Code::dimension_mismatch,
                         "archive: trailing bytes after payload");
  }

 private:
  std::size_t remaining() const { return data_.size() - pos_; }
  void need(std::uint64_t n) const {
    if (n > remaining()) truncated();
  }
  [[noreturn]] static void truncated() {
    throw ArchiveError(ArchiveError::Code::truncated, "archive: file is truncated");
  }

  std::string data_;
  std::size_t pos_ = 0;
};

void dims_check(bool ok, const std::string& what) {
  if (!ok) throw ArchiveError(ArchiveError::Code::dimension_mismatch, "archive: " + what);
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArchiveError(ArchiveError::Code::io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ArchiveError(ArchiveError::Code::io, "failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArchiveError(ArchiveError::Code::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Writer begin(ArchiveKind kind, const ArchiveInfo& info) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kArchiveVersion);
  w.u32(static_cast<std::uint32_t>(kind));
  w.u64(info.seed);
  w.str(info.config_echo);
  return w;
}

ArchiveInfo read_header(Reader& r) {
  char magic[8];
  try {
    r.raw(magic, sizeof magic);
  } catch (const ArchiveError&) {
    throw ArchiveError(ArchiveError::Code::bad_magic, "archive: missing magic header");
  }
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ArchiveError(ArchiveError::Code::bad_magic, "archive: bad magic header");
  ArchiveInfo info;
  info.version = r.u32();
  if (info.version != kArchiveVersion)
    throw ArchiveError(ArchiveError::Code::version_mismatch,
                       "archive: format version " + std::to_string(info.version) +
                           " is not supported (expected " + std::to_string(kArchiveVersion) + ")");
  info.kind = static_cast<ArchiveKind>(r.u32());
  info.seed = r.u64();
  info.config_echo = r.str();
  return info;
}

Reader open(const std::filesystem::path& path, ArchiveKind expected, ArchiveInfo* info_out) {
  Reader r(read_file(path));
  ArchiveInfo info = read_header(r);
  if (info.kind != expected)
    throw ArchiveError(ArchiveError::Code::kind_mismatch,
                       "archive: " + path.string() + " holds a " + to_string(info.kind) +
                           " archive, expected " + to_string(expected));
  if (info_out) *info_out = info;
  return r;
}

void put_rbm(Writer& w, const RbmParams& rbm) {
  w.u64(rbm.n_visible());
  w.u64(rbm.n_hidden());
  w.u32(rbm.family == VisibleFamily::binary ? 0 : 1);
  w.mat(rbm.weights);
  w.vec(rbm.v_bias);
  w.vec(rbm.h_bias);
}

RbmParams get_rbm(Reader& r) {
  const std::uint64_t nv = r.u64(), nh = r.u64();
  const std::uint32_t fam = r.u32();
  dims_check(fam <= 1, "unknown visible family");
  RbmParams p;
  p.family = fam == 0 ? VisibleFamily::binary : VisibleFamily::gaussian;
  p.weights = r.mat();
  p.v_bias = r.vec();
  p.h_bias = r.vec();
  dims_check(p.weights.rows() == nv && p.weights.cols() == nh && p.v_bias.size() == nv &&
                 p.h_bias.size() == nh,
             "RBM payload does not match its dimension header");
  return p;
}

void put_map(Writer& w, const ObservationMap& m) {
  w.u64(m.width);
  w.u64(m.height);
  w.u32(m.pixel_family == VisibleFamily::binary ? 0 : 1);
  w.u64(m.n_states());
  for (const auto& t : m.templates) w.vec(t);
  for (const auto& pool : m.pools) {
    w.u64(pool.size());
    for (const auto& img : pool) w.vec(img);
  }
}

ObservationMap get_map(Reader& r) {
  ObservationMap m;
  m.width = r.u64();
  m.height = r.u64();
  const std::uint32_t fam = r.u32();
  dims_check(fam <= 1, "unknown pixel family");
  m.pixel_family = fam == 0 ? VisibleFamily::binary : VisibleFamily::gaussian;
  const std::uint64_t n = r.u64();
  for (std::uint64_t s = 0; s < n; ++s) {
    m.templates.push_back(r.vec());
    dims_check(m.templates.back().size() == m.dim(), "template size does not match the header");
  }
  for (std::uint64_t s = 0; s < n; ++s) {
    std::vector<Vector> pool(r.u64());
    for (auto& img : pool) {
      img = r.vec();
      dims_check(img.size() == m.dim(), "pool image size does not match the header");
    }
    m.pools.push_back(std::move(pool));
  }
  return m;
}

}  // namespace

const char* to_string(ArchiveKind kind) {
  switch (kind) {
    case ArchiveKind::rbm: return "rbm";
    case ArchiveKind::dbn: return "dbn";
    case ArchiveKind::temporal_set: return "temporal-set";
    case ArchiveKind::linear: return "linear";
    case ArchiveKind::classifier: return "classifier";
    case ArchiveKind::reward: return "reward";
    case ArchiveKind::dataset: return "dataset";
  }
  return "unknown";
}

ArchiveInfo read_archive_info(const std::filesystem::path& path) {
  Reader r(read_file(path));
  return read_header(r);
}

void save_model(const std::filesystem::path& path, const RbmParams& rbm, const ArchiveInfo& info) {
  Writer w = begin(ArchiveKind::rbm, info);
  put_rbm(w, rbm);
  write_file(path, w.bytes());
}

RbmParams load_rbm(const std::filesystem::path& path, ArchiveInfo* info) {
  Reader r = open(path, ArchiveKind::rbm, info);
  RbmParams p = get_rbm(r);
  r.expect_end();
  return p;
}

void save_model(const std::filesystem::path& path, const DbnStack& stack, const ArchiveInfo& info) {
  Writer w = begin(ArchiveKind::dbn, info);
  w.u64(stack.layers.size());
  w.u8(stack.fine_tuned ? 1 : 0);
  for (const auto& layer : stack.layers) put_rbm(w, layer);
  for (const auto& d : stack.decoder) {
    w.mat(d.weights);
    w.vec(d.bias);
  }
  write_file(path, w.bytes());
}

DbnStack load_dbn(const std::filesystem::path& path, ArchiveInfo* info) {
  Reader r = open(path, ArchiveKind::dbn, info);
  DbnStack s;
  const std::uint64_t depth = r.u64();
  s.fine_tuned = r.u8() != 0;
  for (std::uint64_t l = 0; l < depth; ++l) s.layers.push_back(get_rbm(r));
  if (s.fine_tuned)
    for (std::uint64_t l = 0; l < depth; ++l) {
      DecoderLayer d;
      d.weights = r.mat();
      d.bias = r.vec();
      s.decoder.push_back(std::move(d));
    }
  r.expect_end();
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    dims_check(false, e.what());
  }
  return s;
}

void save_model(const std::filesystem::path& path, const TemporalModelSet& set,
                const ArchiveInfo& info) {
  Writer w = begin(ArchiveKind::temporal_set, info);
  w.u64(set.models.size());
  for (const auto& m : set.models) {
    w.u64(m.action);
    w.u64(m.sampling.gibbs_steps);
    w.u32(static_cast<std::uint32_t>(m.sampling.clamp));
    w.u32(static_cast<std::uint32_t>(m.sampling.output));
    put_rbm(w, m.rbm);
  }
  write_file(path, w.bytes());
}

TemporalModelSet load_temporal_set(const std::filesystem::path& path, ArchiveInfo* info) {
  Reader r = open(path, ArchiveKind::temporal_set, info);
  TemporalModelSet set;
  const std::uint64_t n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    TemporalModel m;
    m.action = r.u64();
    m.sampling.gibbs_steps = r.u64();
    const std::uint32_t clamp = r.u32(), output = r.u32();
    dims_check(clamp <= 1 && output <= 1, "unknown temporal sampling mode");
    m.sampling.clamp = static_cast<ClampMode>(clamp);
    m.sampling.output = static_cast<NextStateOutput>(output);
    m.rbm = get_rbm(r);
    dims_check(m.rbm.n_visible() % 2 == 0, "temporal RBM has an odd visible layer");
    set.models.push_back(std::move(m));
  }
  r.expect_end();
  return set;
}

void save_model(const std::filesystem::path& path, const LinearExpectationModel& model,
                const ArchiveInfo& info) {
  Writer w = begin(ArchiveKind::linear, info);
  w.u64(model.n_actions());
  w.u64(model.feature_size());
  for (std::size_t a = 0; a < model.n_actions(); ++a) {
    w.mat(model.transition[a]);
    w.vec(model.reward[a]);
  }
  write_file(path, w.bytes());
}

LinearExpectationModel load_linear(const std::filesystem::path& path, ArchiveInfo* info) {
  Reader r = open(path, ArchiveKind::linear, info);
  const std::uint64_t n = r.u64(), d = r.u64();
  LinearExpectationModel m;
  for (std::uint64_t a = 0; a < n; ++a) {
    m.transition.push_back(r.mat());
    m.reward.push_back(r.vec());
    dims_check(m.transition.back().rows() == d && m.transition.back().cols() == d &&
                   m.reward.back().size() == d,
               "linear model payload does not match its dimension header");
  }
  r.expect_end();
  return m;
}

void save_model(const std::filesystem::path& path, const ClassifierHead& head,
                const ArchiveInfo& info) {
  Writer w = begin(ArchiveKind::classifier, info);
  w.u8(head.encoded_input ? 1 : 0);
  w.u64(head.net.layers.size());
  for (const auto& layer : head.net.layers) {
    w.u32(static_cast<std::uint32_t>(layer.activation));
    w.mat(layer.weights);
    w.vec(layer.bias);
  }
  write_file(path, w.bytes());
}

ClassifierHead load_classifier(const std::filesystem::path& path, ArchiveInfo* info) {
  Reader r = open(path, ArchiveKind::classifier, info);
  ClassifierHead head;
  head.encoded_input = r.u8() != 0;
  const std::uint64_t n = r.u64();
  for (std::uint64_t l = 0; l < n; ++l) {
    DenseLayer layer;
    const std::uint32_t act = r.u32();
    dims_check(act <= 2, "unknown activation");
    layer.activation = static_cast<Activation>(act);
    layer.weights = r.mat();
    layer.bias = r.vec();
    head.net.layers.push_back(std::move(layer));
  }
  r.expect_end();
  try {
    head.net.validate();
  } catch (const std::invalid_argument& e) {
    dims_check(false, e.what());
  }
  return head;
}

void save_model(const std::filesystem::path& path, const RewardModel& model,
                const ArchiveInfo& info) {
  Writer w = begin(ArchiveKind::reward, info);
  w.vec(model.weights);
  w.f64(model.bias);
  write_file(path, w.bytes());
}

RewardModel load_reward(const std::filesystem::path& path, ArchiveInfo* info) {
  Reader r = open(path, ArchiveKind::reward, info);
  RewardModel m;
  m.weights = r.vec();
  m.bias = r.f64();
  r.expect_end();
  return m;
}

void save_model(const std::filesystem::path& path, const Dataset& dataset,
                const ArchiveInfo& info) {
  Writer w = begin(ArchiveKind::dataset, info);
  put_map(w, dataset.observations);
  w.u64(dataset.transitions.size());
  for (const auto& t : dataset.transitions) {
    w.u64(t.s);
    w.vec(t.observation);
    w.u64(t.action);
    w.f64(t.reward);
    w.u64(t.s_next);
    w.vec(t.observation_next);
    w.u8(t.done ? 1 : 0);
  }
  write_file(path, w.bytes());
}

Dataset load_dataset(const std::filesystem::path& path, ArchiveInfo* info) {
  Reader r = open(path, ArchiveKind::dataset, info);
  Dataset d;
  d.observations = get_map(r);
  const std::uint64_t n = r.u64();
  d.transitions.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Transition t;
    t.s = r.u64();
    t.observation = r.vec();
    t.action = r.u64();
    t.reward = r.f64();
    t.s_next = r.u64();
    t.observation_next = r.vec();
    t.done = r.u8() != 0;
    dims_check(t.observation.size() == d.observations.dim() &&
                   t.observation_next.size() == d.observations.dim(),
               "transition observation size does not match the observation map");
    d.transitions.push_back(std::move(t));
  }
  r.expect_end();
  return d;
}

IdxData load_idx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_idx: cannot open " + path.string());
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(bytes[i]); };
  if (bytes.size() < 4 || byte(0) != 0 || byte(1) != 0 || byte(2) != 0x08)
    throw std::runtime_error("load_idx: bad magic in " + path.string());
  const std::size_t ndims = byte(3);
  if (ndims == 0) throw std::runtime_error("load_idx: zero dimensions in " + path.string());
  if (bytes.size() < 4 + 4 * ndims) throw std::runtime_error("load_idx: truncated header");

  IdxData data;
  std::size_t total = 1;
  for (std::size_t d = 0; d < ndims; ++d) {
    const std::size_t o = 4 + 4 * d;
    std::uint32_t n = (std::uint32_t{byte(o)} << 24) | (std::uint32_t{byte(o + 1)} << 16) |
                      (std::uint32_t{byte(o + 2)} << 8) | std::uint32_t{byte(o + 3)};
    data.dims.push_back(n);
    total *= n;
  }
  const std::size_t offset = 4 + 4 * ndims;
  if (bytes.size() - offset < total)
    throw std::runtime_error("load_idx: short payload in " + path.string() + " (expected " +
                             std::to_string(total) + " bytes, found " +
                             std::to_string(bytes.size() - offset) + ")");
  data.raw.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                  bytes.begin() + static_cast<std::ptrdiff_t>(offset + total));
  const std::size_t items = data.dims[0];
  const std::size_t item_size = items == 0 ? 0 : total / items;
  data.items.reserve(items);
  for (std::size_t i = 0; i < items; ++i) {
    Vector v(item_size);
    for (std::size_t p = 0; p < item_size; ++p) v[p] = data.raw[i * item_size + p] / 255.0;
    data.items.push_back(std::move(v));
  }
  return data;
}

void save_idx(const std::filesystem::path& path, const std::vector<std::uint32_t>& dims,
              const std::vector<std::uint8_t>& payload) {
  require(!dims.empty() && dims.size() < 256, "save_idx: bad dimension count");
  std::string bytes = {'\0', '\0', '\x08', static_cast<char>(dims.size())};
  for (std::uint32_t n : dims)
    for (int shift = 24; shift >= 0; shift -= 8) bytes.push_back(static_cast<char>((n >> shift) & 0xff));
  bytes.append(payload.begin(), payload.end());
  write_file(path, bytes);
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  for (const auto& row : rows)
    if (!(row.size() == header.size())) fail("write_csv: row has " + std::to_string(row.size()) +
                                             " fields, header has " +
                                             std::to_string(header.size()));
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  write_file(path, out);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
  CsvTable table;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
  };
  if (!std::getline(in, line)) return table;
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& f : split(line)) {
      double x = 0.0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), x);
      if (res.ec != std::errc()) throw std::runtime_error("read_csv: bad number '" + f + "'");
      row.push_back(x);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace deepdyna
