#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace deepdyna {

using Vector = std::vector<double>;

[[noreturn]] inline void fail(const std::string& message) { throw std::invalid_argument(message); }

/// Throws std::invalid_argument carrying `message` when `condition` is false.
inline void require(bool condition, const char* message) {
  if (!condition) fail(message);
}
inline void require(bool condition, const std::string& message) {
  if (!condition) fail(message);
}

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {entries_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

  std::span<double> entries() { return entries_; }
  std::span<const double> entries() const { return entries_; }

  void fill(double value);
  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Vector matvec(const Matrix& m, std::span<const double> v);
/// Computes mᵀ·v without materializing the transpose.
Vector matvec_transposed(const Matrix& m, std::span<const double> v);
Matrix matmul(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
/// y += a·x
void axpy(double a, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> v);

double sigmoid(double x);

/// xoshiro256** seeded through splitmix64. Streams are identical across
/// platforms for a given seed; all derived samplers below use only integer
/// arithmetic and IEEE operations so they stay portable too.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  /// Standard normal draw (Marsaglia polar method).
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Mixes a base seed with a label so independent pipeline stages get
/// independent but reproducible streams.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

int bernoulli(double p, Rng& rng);
double gaussian(double mean, double stddev, Rng& rng);
/// Draws an index from a discrete distribution (weights must sum to ~1).
std::size_t sample_categorical(std::span<const double> probabilities, Rng& rng);

/// Lowest index of the maximum entry.
std::size_t argmax(std::span<const double> v);

}  // namespace deepdyna
