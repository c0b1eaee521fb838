#include <algorithm>
#include <bit>
#include <random>
#include <vector>

#include "doctest.h"
#include "dynwt/errors.hpp"
#include "dynwt/wavelet_tree.hpp"

using namespace dynwt;

namespace {

tree_config tiny(uint64_t sigma) {
  tree_config c;
  c.sigma = sigma;
  c.cap_bits = 24;
  c.mini_bits = 8;
  return c;
}

uint64_t oracle_rank(const std::vector<uint64_t>& v, uint64_t a, uint64_t i) {
  return static_cast<uint64_t>(std::count(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(i), a));
}

uint64_t oracle_select(const std::vector<uint64_t>& v, uint64_t a, uint64_t k) {
  for (uint64_t i = 0; i < v.size(); ++i)
    if (v[i] == a && --k == 0) return i + 1;
  return 0;
}

// Random edits with every answer and the full structure checked each step.
void churn(wavelet_tree& t, std::vector<uint64_t>& v, uint64_t sigma, uint64_t seed, int steps,
           double erase_share, int audit_every) {
  std::mt19937_64 rng(seed);
  for (int s = 0; s < steps; ++s) {
    const double u = std::uniform_real_distribution<double>(0, 1)(rng);
    if (v.empty() || u >= erase_share) {
      const uint64_t i = std::uniform_int_distribution<uint64_t>(1, v.size() + 1)(rng);
      const uint64_t a = std::uniform_int_distribution<uint64_t>(0, sigma - 1)(rng);
      t.insert(i, a);
      v.insert(v.begin() + static_cast<std::ptrdiff_t>(i - 1), a);
    } else {
      const uint64_t i = std::uniform_int_distribution<uint64_t>(1, v.size())(rng);
      t.erase(i);
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(i - 1));
    }
    REQUIRE(t.size() == v.size());
    if (audit_every && s % audit_every == 0) {
      t.audit();
      REQUIRE(t.to_vector() == v);
    }
    if (!v.empty()) {
      const uint64_t i = std::uniform_int_distribution<uint64_t>(1, v.size())(rng);
      REQUIRE(t.access(i) == v[i - 1]);
      const uint64_t a = v[std::uniform_int_distribution<uint64_t>(0, v.size() - 1)(rng)];
      const uint64_t j = std::uniform_int_distribution<uint64_t>(0, v.size())(rng);
      REQUIRE(t.rank(a, j) == oracle_rank(v, a, j));
      const uint64_t total = oracle_rank(v, a, v.size());
      const uint64_t k = std::uniform_int_distribution<uint64_t>(1, total)(rng);
      REQUIRE(t.select(a, k) == oracle_select(v, a, k));
    }
  }
  t.audit();
  REQUIRE(t.to_vector() == v);
}

}  // namespace

TEST_CASE("empty tree") {
  wavelet_tree t;
  CHECK(t.size() == 0);
  CHECK(t.rank(5, 0) == 0);
  CHECK_THROWS_AS(t.access(1), error);
  CHECK_THROWS_AS(t.select(5, 1), error);
  CHECK_THROWS_AS(t.erase(1), error);
  t.audit();
  const tree_stats s = t.stats();
  CHECK(s.n == 0);
  CHECK(s.payload_offset_bits == 0);
  CHECK(s.chunks == 0);
}

TEST_CASE("insert-only sequences match the oracle") {
  for (uint64_t sigma : {1, 2, 3, 5, 16, 200}) {
    CAPTURE(sigma);
    wavelet_tree t(tiny(sigma));
    std::vector<uint64_t> v;
    churn(t, v, sigma, sigma * 7 + 1, 600, 0.0, 1);
  }
}

TEST_CASE("mixed edits with lazy deletion match the oracle") {
  for (uint64_t sigma : {2, 4, 16, 300}) {
    for (uint64_t seed : {1, 2, 3}) {
      CAPTURE(sigma);
      CAPTURE(seed);
      wavelet_tree t(tiny(sigma));
      std::vector<uint64_t> v;
      churn(t, v, sigma, seed * 1000 + sigma, 1500, 0.35, 1);
      CHECK(t.cleanings() > 0);
    }
  }
}

TEST_CASE("shrinking to empty and growing again") {
  wavelet_tree t(tiny(8));
  std::vector<uint64_t> v;
  churn(t, v, 8, 5, 400, 0.0, 7);
  std::mt19937_64 rng(9);
  while (!v.empty()) {
    const uint64_t i = std::uniform_int_distribution<uint64_t>(1, v.size())(rng);
    t.erase(i);
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(i - 1));
    t.audit();
  }
  CHECK(t.size() == 0);
  churn(t, v, 8, 6, 300, 0.2, 5);
}

TEST_CASE("unbounded alphabet of large symbols") {
  wavelet_tree t(tiny(0));
  std::vector<uint64_t> v;
  std::mt19937_64 rng(17);
  for (int s = 0; s < 500; ++s) {
    const uint64_t a = rng() % 40 * 0x0123456789abcdefull;
    const uint64_t i = std::uniform_int_distribution<uint64_t>(1, v.size() + 1)(rng);
    t.insert(i, a);
    v.insert(v.begin() + static_cast<std::ptrdiff_t>(i - 1), a);
    if (s % 3 == 2) {
      const uint64_t j = std::uniform_int_distribution<uint64_t>(1, v.size())(rng);
      t.erase(j);
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(j - 1));
    }
  }
  t.audit();
  CHECK(t.to_vector() == v);
  for (uint64_t a : v) CHECK(t.rank(a, v.size()) == oracle_rank(v, a, v.size()));
}

TEST_CASE("symbols outside the configured alphabet are refused") {
  wavelet_tree t(tiny(4));
  CHECK_THROWS_AS(t.insert(1, 4), error);
  t.insert(1, 3);
  CHECK_THROWS_AS(t.insert(3, 0), error);
  t.audit();
}

TEST_CASE("alphabet slots are recycled when a symbol disappears") {
  wavelet_tree t(tiny(0));
  t.insert(1, 100);
  t.insert(2, 200);
  const auto slot = t.alphabet().slot_of(100);
  REQUIRE(slot);
  t.erase(1);
  CHECK(!t.alphabet().slot_of(100));
  t.insert(1, 300);
  CHECK(t.alphabet().slot_of(300) == slot);
  CHECK(t.rank(100, 2) == 0);
  t.audit();
}

TEST_CASE("build_from equals left-to-right insertion") {
  std::mt19937_64 rng(3);
  for (uint64_t sigma : {2, 7, 64}) {
    std::vector<uint64_t> v(700);
    for (auto& a : v) a = rng() % sigma;
    wavelet_tree b = wavelet_tree::build_from(v, tiny(sigma));
    b.audit();
    CHECK(b.to_vector() == v);
    wavelet_tree t(tiny(sigma));
    for (size_t i = 0; i < v.size(); ++i) t.insert(i + 1, v[i]);
    for (uint64_t i = 1; i <= v.size(); i += 13) CHECK(b.access(i) == t.access(i));
    std::vector<uint64_t> copy = v;
    churn(b, copy, sigma, 77, 300, 0.3, 10);
  }
}

TEST_CASE("navigation identities") {
  std::mt19937_64 rng(11);
  std::vector<uint64_t> v(900);
  for (auto& a : v) a = rng() % 37;
  wavelet_tree t = wavelet_tree::build_from(v, tiny(37));
  for (int s = 0; s < 200; ++s) t.erase(1 + rng() % t.size());
  const auto slots = t.reconstruct();
  CHECK(slots.size() == t.stored_size());
  for (uint64_t i = 1; i <= t.size(); ++i) {
    position q = t.root_position(i);
    for (uint32_t d = 0; d < t.height(); ++d) {
      const auto digits = t.node_digits(t.node_of(q));
      const uint64_t x = t.chain_index(q);
      const uint32_t dig = t.digit_at(q);
      const position c = t.descend(q, dig);
      CHECK(t.ascend(c) == q);
      CHECK(t.chain_index(c) ==
            static_cast<uint64_t>(std::count(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(x), dig)));
      q = c;
    }
    CHECK(t.is_alive(q));
    CHECK(t.node_of(q).prefix + 1 == *t.alphabet().slot_of(t.access(i)));
  }
}

TEST_CASE("clean hook sees identical answers before and after") {
  wavelet_tree t(tiny(16));
  std::vector<uint64_t> before, after;
  int calls = 0;
  t.set_clean_hook([&](const wavelet_tree& w, bool pre) {
    ++calls;
    (pre ? before : after) = w.to_vector();
    if (!pre) {
      CHECK(w.deleted() == 0);
      CHECK(w.stored_size() == w.size());
    }
  });
  std::vector<uint64_t> v;
  churn(t, v, 16, 4, 800, 0.3, 50);
  CHECK(calls >= 2);
  CHECK(before == after);
}

TEST_CASE("word size follows the length through rebuilds") {
  tree_config c;
  c.sigma = 50;
  c.min_w = 4;
  c.cap_bits = 24;
  c.mini_bits = 8;
  wavelet_tree t(c);
  std::vector<uint64_t> v;
  churn(t, v, 50, 12, 1200, 0.1, 100);
  CHECK(t.rebuilds() >= 2);
  CHECK(t.params().w == std::max<uint32_t>(4, std::bit_width(t.stored_size())));
  const uint64_t grown = t.rebuilds();
  std::mt19937_64 rng(2);
  while (v.size() > 3) {
    const uint64_t i = 1 + rng() % v.size();
    t.erase(i);
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(i - 1));
  }
  t.audit();
  CHECK(t.to_vector() == v);
  CHECK(t.rebuilds() > grown);
}

TEST_CASE("default parameters on a longer run") {
  wavelet_tree t;
  std::vector<uint64_t> v;
  churn(t, v, 256, 99, 20000, 0.2, 2000);
  const tree_stats s = t.stats();
  CHECK(s.links <= (s.rho + 1) * s.blocks);
}
