#include <map>
#include <random>

#include "doctest.h"
#include "dynwt/alphabet.hpp"
#include "dynwt/errors.hpp"

using namespace dynwt;

TEST_CASE("slots follow occurrence counts") {
  std::mt19937_64 rng(6);
  alphabet_map a(1000);
  std::map<uint64_t, uint64_t> counts;
  for (int s = 0; s < 20000; ++s) {
    const uint64_t x = (rng() % 60) * 0x9e3779b97f4a7c15ull;
    if (rng() % 2 || !counts.count(x)) {
      const bool fresh = !counts.count(x);
      const uint64_t expect = fresh ? (a.free_slots().empty() ? a.next_unused() : *a.free_slots().begin()) : *a.slot_of(x);
      CHECK(a.acquire(x) == expect);
      ++counts[x];
    } else {
      a.release(x);
      if (--counts[x] == 0) counts.erase(x);
    }
    REQUIRE(a.live() == counts.size());
  }
  for (const auto& [x, c] : counts) {
    const uint64_t slot = *a.slot_of(x);
    CHECK(a.symbol_of(slot) == x);
    CHECK(a.occurrences(slot) == c);
    CHECK(a.count(x) == c);
  }
  CHECK(a.live_slots().size() == counts.size());
  CHECK(a.live() + a.free_slots().size() + 1 == a.next_unused());
}

TEST_CASE("alphabet errors") {
  alphabet_map a(2);
  a.acquire(10);
  a.acquire(20);
  CHECK_THROWS_AS(a.acquire(30), error);
  CHECK_THROWS_AS(a.release(30), error);
  CHECK_THROWS_AS(a.symbol_of(3), error);
  CHECK(a.count(30) == 0);
  a.release(10);
  CHECK(!a.slot_of(10));
  CHECK(a.acquire(30) == 1);
}

TEST_CASE("restore reproduces a state") {
  alphabet_map a(50);
  for (uint64_t x : {7, 8, 9, 8, 7, 7}) a.acquire(x);
  a.release(8);
  a.release(8);
  std::vector<std::pair<uint64_t, std::pair<uint64_t, uint64_t>>> live;
  for (uint64_t s : a.live_slots()) live.push_back({s, {a.symbol_of(s), a.occurrences(s)}});
  alphabet_map b;
  b.restore(a.capacity(), a.next_unused(), a.free_slots(), live);
  CHECK(b.live_slots() == a.live_slots());
  CHECK(b.count(7) == 3);
  CHECK(b.acquire(100) == 2);
}
