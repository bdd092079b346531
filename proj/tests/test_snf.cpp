#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "towerlab/snf.hpp"

#include <random>

using namespace towerlab;

namespace {

IntMat from(std::vector<std::vector<long long>> rows) {
  IntMat m;
  for (auto& r : rows) {
    std::vector<BigInt> row(r.begin(), r.end());
    m.push_back(row);
  }
  return m;
}

}  // namespace

TEST_CASE("identity and diagonal") {
  auto d = smith_normal_form(from({{1, 0}, {0, 1}}));
  CHECK(d == std::vector<BigInt>{1, 1});
  d = smith_normal_form(from({{2, 0}, {0, 4}}));
  CHECK(d == std::vector<BigInt>{2, 4});
}

TEST_CASE("hand oracle for [[4,2],[2,4]]") {
  // row/column reduction by hand gives invariant factors (2, 6)
  auto d = smith_normal_form(from({{4, 2}, {2, 4}}));
  CHECK(d == std::vector<BigInt>{2, 6});
}

TEST_CASE("zero rows and rectangular shapes") {
  auto d = smith_normal_form(from({{0, 0}, {0, 0}}));
  CHECK(d == std::vector<BigInt>{0, 0});
  d = smith_normal_form(from({{2, 4, 6}}));
  CHECK(d == std::vector<BigInt>{2});
  d = smith_normal_form(from({{6}, {4}}));
  CHECK(d == std::vector<BigInt>{2});
}

TEST_CASE("divisibility chain and unimodular invariance") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    unsigned n = 2 + unsigned(rng() % 4), m = 2 + unsigned(rng() % 4);
    IntMat a(m, std::vector<BigInt>(n, 0));
    for (auto& row : a)
      for (auto& x : row) x = BigInt(std::int64_t(rng() % 19) - 9);
    std::vector<BigInt> d = smith_normal_form(a);
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
      if (d[i + 1] != 0) {
        REQUIRE(d[i] != 0);
        CHECK(d[i + 1] % d[i] == 0);
      }
    }
    // random row/column operations preserve the factors
    IntMat b = a;
    for (int k = 0; k < 12; ++k) {
      unsigned r1 = unsigned(rng() % m), r2 = unsigned(rng() % m);
      if (r1 != r2) {
        BigInt f = BigInt(std::int64_t(rng() % 5) - 2);
        for (unsigned j = 0; j < n; ++j) b[r1][j] += f * b[r2][j];
      }
      unsigned c1 = unsigned(rng() % n), c2 = unsigned(rng() % n);
      if (c1 != c2) {
        BigInt f = BigInt(std::int64_t(rng() % 5) - 2);
        for (unsigned i = 0; i < m; ++i) b[i][c1] += f * b[i][c2];
      }
    }
    CHECK(smith_normal_form(b) == d);
  }
}
