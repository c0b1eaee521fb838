#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "dynwt/errors.hpp"
#include "dynwt/psums.hpp"

using namespace dynwt;

TEST_CASE("partial sums match a plain vector") {
  std::mt19937_64 rng(4);
  partial_sums ps;
  std::vector<uint64_t> v;
  for (int s = 0; s < 20000; ++s) {
    const int op = static_cast<int>(rng() % 4);
    if (op == 0 || v.empty()) {
      const size_t j = 1 + rng() % (v.size() + 1);
      const uint64_t x = rng() % 5;
      ps.insert(j, x);
      v.insert(v.begin() + static_cast<std::ptrdiff_t>(j - 1), x);
    } else if (op == 1) {
      const size_t j = 1 + rng() % v.size();
      if (v[j - 1]) {
        CHECK_THROWS_AS(ps.remove(j), error);
        ps.add(j, -static_cast<int64_t>(v[j - 1]));
        v[j - 1] = 0;
      }
      ps.remove(j);
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(j - 1));
    } else {
      const size_t j = 1 + rng() % v.size();
      const int64_t d = static_cast<int64_t>(rng() % 7) - std::min<int64_t>(3, static_cast<int64_t>(v[j - 1]));
      ps.add(j, d);
      v[j - 1] = static_cast<uint64_t>(static_cast<int64_t>(v[j - 1]) + d);
    }
    REQUIRE(ps.size() == v.size());
    const uint64_t total = std::accumulate(v.begin(), v.end(), uint64_t{0});
    REQUIRE(ps.total() == total);
    if (v.empty()) continue;
    const size_t j = rng() % (v.size() + 1);
    REQUIRE(ps.sum(j) == std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(j), uint64_t{0}));
    const size_t q = 1 + rng() % v.size();
    REQUIRE(ps.value(q) == v[q - 1]);
    if (total) {
      const uint64_t i = 1 + rng() % total;
      size_t k = 0;
      uint64_t before = 0;
      while (before + v[k] < i) before += v[k++];
      const auto [at, off] = ps.search(i);
      REQUIRE(at == k + 1);
      REQUIRE(off == i - before);
    }
    if (s % 1000 == 0) REQUIRE(ps.values() == v);
  }
  ps.clear();
  CHECK(ps.size() == 0);
  CHECK(ps.total() == 0);
}
