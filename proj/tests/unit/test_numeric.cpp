#include <algorithm>
#include <cmath>
#include <map>

#include "deepdyna/numeric.hpp"
#include "doctest.h"

using namespace deepdyna;

TEST_SUITE("numeric") {

TEST_CASE("matvec on a 2x2 example") {
  const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
  CHECK(matvec(m, Vector{1, 1}) == Vector{3, 7});
  CHECK(matvec_transposed(m, Vector{1, 1}) == Vector{4, 6});
  CHECK_THROWS_AS(matvec(m, Vector{1, 1, 1}), std::invalid_argument);
}

TEST_CASE("matmul and transpose") {
  const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  const Matrix b = Matrix::from_rows({{7, 8}, {9, 10}, {11, 12}});
  CHECK(matmul(a, b) == Matrix::from_rows({{58, 64}, {139, 154}}));
  CHECK(a.transposed().transposed() == a);
  CHECK(matmul(Matrix::identity(2), a) == a);
  CHECK_THROWS(matmul(a, a));
}

TEST_CASE("dot handles lengths not divisible by four") {
  Vector a, b;
  double expect = 0.0;
  for (int i = 1; i <= 7; ++i) {
    a.push_back(i);
    b.push_back(0.5 * i);
    expect += 0.5 * i * i;
  }
  CHECK(dot(a, b) == doctest::Approx(expect));
  Vector y{1, 1};
  axpy(2.0, Vector{1, 2}, y);
  CHECK(y == Vector{3, 5});
}

TEST_CASE("sigmoid") {
  CHECK(sigmoid(1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-3.0) == doctest::Approx(1.0 - sigmoid(3.0)));
}

TEST_CASE("xoshiro256** stream matches the reference generator") {
  Rng zero(0);
  CHECK(zero.next_u64() == 0x99ec5f36cb75f2b4ULL);
  CHECK(zero.next_u64() == 0xbf6e1f784956452aULL);
  CHECK(zero.next_u64() == 0x1a5f849d4933e6e0ULL);
  Rng r(42);
  CHECK(r.next_u64() == 0x15780b2e0c2ec716ULL);
  CHECK(r.next_u64() == 0x6104d9866d113a7eULL);
  CHECK(r.next_u64() == 0xae17533239e499a1ULL);
}

TEST_CASE("derive_seed") {
  CHECK(derive_seed(7, "data") == 0x42ef76b0b925f8f8ULL);
  CHECK(derive_seed(0, "") == 0xc3817c016ba4ff30ULL);
  CHECK(derive_seed(7, "data") != derive_seed(7, "model"));
}

TEST_CASE("uniform draws stay in range") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.uniform_index(7) < 7);
  }
  CHECK_THROWS(rng.uniform_index(0));
}

TEST_CASE("normal draws have unit variance") {
  Rng rng(5);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(gaussian(2.0, 0.0, rng) == 2.0);
}

TEST_CASE("categorical frequencies") {
  Rng rng(11);
  const Vector p{0.1, 0.0, 0.6, 0.3};
  std::map<std::size_t, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_categorical(p, rng)];
  CHECK(counts[1] == 0);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(counts[i] / double(n) - p[i]) < 0.01);
}

TEST_CASE("bernoulli rejects bad probabilities") {
  Rng rng(1);
  CHECK(bernoulli(0.0, rng) == 0);
  CHECK(bernoulli(1.0, rng) == 1);
  CHECK_THROWS_AS(bernoulli(1.5, rng), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli(std::nan(""), rng), std::invalid_argument);
}

TEST_CASE("argmax takes the lowest index on ties") {
  CHECK(argmax(Vector{1, 3, 3, 2}) == 1);
  CHECK(argmax(Vector{5}) == 0);
  CHECK_THROWS(argmax(Vector{}));
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(9);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  rng.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

}
