#include <map>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "dynwt/errors.hpp"
#include "dynwt/linkmesh.hpp"

using namespace dynwt;

namespace {

struct directory : link_directory {
  std::map<block_id, std::unique_ptr<link_table>> tables;
  std::vector<handle> external;

  link_table& table(block_id id) override { return *tables.at(id); }
  void retarget_external(local_id ref, handle now) override { external.at(ref) = now; }
  link_table& add(block_id id, uint32_t rho) {
    return *(tables[id] = std::make_unique<link_table>(rho));
  }
};

// Expected anchor positions, kept by hand alongside the tables.
struct expected_link {
  handle src;  // Down end
  uint32_t src_index;
  handle dst;  // Up end
  uint32_t dst_index;
};

void verify(directory& dir, const std::vector<expected_link>& links,
            const std::vector<std::pair<uint32_t, block_id>>& refs) {
  size_t ends = 0;
  for (auto& [id, t] : dir.tables) ends += t->link_ends();
  REQUIRE(ends == 2 * links.size());
  for (const auto& l : links) {
    const link_end s = dir.table(l.src.block).end(l.src.local);
    const link_end d = dir.table(l.dst.block).end(l.dst.local);
    REQUIRE(s.index == l.src_index);
    REQUIRE(d.index == l.dst_index);
    REQUIRE(s.remote == l.dst);
    REQUIRE(d.remote == l.src);
    REQUIRE(d.kind.is_up());
    REQUIRE(!s.kind.is_up());
  }
  for (size_t r = 0; r < refs.size(); ++r) {
    const handle h = dir.external[r];
    REQUIRE(h.block == refs[r].second);
    REQUIRE(dir.table(h.block).index_of(h.local) == refs[r].first);
  }
}

}  // namespace

TEST_CASE("smallest unused local ids are reused first") {
  link_table t(4);
  const local_id a = t.attach_link(3, link_kind::down(1), {}, kFirstOccurrence);
  const local_id b = t.attach_link(5, link_kind::down(1), {}, kFirstOccurrence);
  const local_id c = t.attach_ref(7, {kExternalBlock, 0});
  CHECK(a == 0);
  CHECK(b == 1);
  CHECK(c == 2);
  t.detach(b);
  t.detach(a);
  CHECK(t.attach_ref(1, {}) == 0);
  CHECK(t.attach_ref(1, {}) == 1);
  CHECK(t.attach_ref(1, {}) == 3);
}

TEST_CASE("lookups by kind and position") {
  link_table t(3);
  t.attach_link(4, link_kind::down(0), {}, kFirstOccurrence);
  t.attach_link(9, link_kind::down(0), {}, kBlockHead);
  t.attach_link(6, link_kind::down(2), {}, kFirstOccurrence);
  t.attach_link(1, link_kind::up(), {}, kBlockHead);
  CHECK(!t.last_at_or_before(3, link_kind::down(0)));
  CHECK(t.last_at_or_before(4, link_kind::down(0))->index == 4);
  CHECK(t.last_at_or_before(8, link_kind::down(0))->index == 4);
  CHECK(t.last_at_or_before(100, link_kind::down(0))->index == 9);
  CHECK(t.at(6, link_kind::down(2)));
  CHECK(!t.at(6, link_kind::down(0)));
  CHECK(t.owned_links() == 3);  // two first occurrences and the head up end
  CHECK_THROWS_AS(t.attach_link(4, link_kind::down(0), {}, 0), error);
  CHECK_THROWS_AS(t.attach_link(2, link_kind::down(3), {}, 0), error);
  CHECK_THROWS_AS(t.attach_link(0, link_kind::up(), {}, 0), error);
  CHECK_THROWS_AS(t.shift_on_erase(6), error);
  t.shift_on_insert(5);
  CHECK(t.at(7, link_kind::down(2)));
  t.shift_on_erase(5);
  CHECK(t.at(6, link_kind::down(2)));
  CHECK(t.at(4, link_kind::down(0)));
}

TEST_CASE("links survive random edits, splits and merges") {
  std::mt19937_64 rng(21);
  const uint32_t rho = 4;
  directory dir;
  // Block lengths; parent blocks are 0..2, child blocks 100..102.
  std::map<block_id, uint32_t> len;
  for (block_id b : {0u, 1u, 2u, 100u, 101u, 102u}) {
    dir.add(b, rho);
    len[b] = 50;
  }
  std::vector<expected_link> links;
  std::vector<std::pair<uint32_t, block_id>> refs;
  block_id next_block = 200;

  auto anchored = [&](block_id b, uint32_t i) {
    for (const auto& l : links)
      if ((l.src.block == b && l.src_index == i) || (l.dst.block == b && l.dst_index == i)) return true;
    for (const auto& r : refs)
      if (r.second == b && r.first == i) return true;
    return false;
  };
  auto blocks_of = [&](bool parent) {
    std::vector<block_id> out;
    for (auto& [b, n] : len)
      if ((b < 100 || (b >= 200 && b % 2 == 0)) == parent) out.push_back(b);
    return out;
  };

  for (int step = 0; step < 4000; ++step) {
    const int op = static_cast<int>(rng() % 7);
    const auto parents = blocks_of(true);
    const auto children = blocks_of(false);
    if (op == 0) {
      const block_id p = parents[rng() % parents.size()];
      const block_id c = children[rng() % children.size()];
      if (!len[p] || !len[c]) continue;
      const uint32_t pi = 1 + rng() % len[p];
      const uint32_t ci = 1 + rng() % len[c];
      const uint32_t t = rng() % rho;
      if (dir.table(p).at(pi, link_kind::down(t)) || dir.table(c).at(ci, link_kind::up())) continue;
      const auto [s, d] = register_link(dir, p, pi, link_kind::down(t), c, ci, kFirstOccurrence);
      links.push_back({s, pi, d, ci});
    } else if (op == 1 && links.size() > 20) {
      const size_t k = rng() % links.size();
      unregister_link(dir, rng() % 2 ? links[k].src : links[k].dst);
      links.erase(links.begin() + static_cast<std::ptrdiff_t>(k));
    } else if (op == 2) {
      const block_id p = parents[rng() % parents.size()];
      if (!len[p]) continue;
      const uint32_t i = 1 + rng() % len[p];
      if (anchored(p, i)) continue;
      refs.push_back({i, p});
      dir.external.push_back({p, dir.table(p).attach_ref(i, {kExternalBlock, static_cast<local_id>(refs.size() - 1)})});
    } else if (op == 3) {
      const auto all = rng() % 2 ? parents : children;
      const block_id b = all[rng() % all.size()];
      const uint32_t i = 1 + rng() % (len[b] + 1);
      dir.table(b).shift_on_insert(i);
      ++len[b];
      for (auto& l : links) {
        if (l.src.block == b && l.src_index >= i) ++l.src_index;
        if (l.dst.block == b && l.dst_index >= i) ++l.dst_index;
      }
      for (auto& r : refs)
        if (r.second == b && r.first >= i) ++r.first;
    } else if (op == 4) {
      const auto all = rng() % 2 ? parents : children;
      const block_id b = all[rng() % all.size()];
      if (!len[b]) continue;
      const uint32_t i = 1 + rng() % len[b];
      if (anchored(b, i)) {
        CHECK_THROWS_AS(dir.table(b).shift_on_erase(i), error);
        continue;
      }
      dir.table(b).shift_on_erase(i);
      --len[b];
      for (auto& l : links) {
        if (l.src.block == b && l.src_index > i) --l.src_index;
        if (l.dst.block == b && l.dst_index > i) --l.dst_index;
      }
      for (auto& r : refs)
        if (r.second == b && r.first > i) --r.first;
    } else if (op == 5) {
      // Split a block; the new block keeps the parent/child parity.
      const bool parent = rng() % 2;
      const auto all = parent ? parents : children;
      const block_id b = all[rng() % all.size()];
      const uint32_t m = static_cast<uint32_t>(rng() % (len[b] + 1));
      const block_id nb = parent ? next_block : next_block + 1;
      next_block += 2;
      link_table& right = dir.add(nb, rho);
      len[nb] = len[b] - m;
      len[b] = m;
      relocate_on_split(dir, b, dir.table(b), nb, right, m);
      for (size_t k = 0; k < links.size(); ++k) {
        auto& l = links[k];
        if (l.src.block == b && l.src_index > m) {
          l.src_index -= m;
          l.src.block = nb;
          l.src.local = dir.table(l.dst.block).end(l.dst.local).remote.local;
        }
        if (l.dst.block == b && l.dst_index > m) {
          l.dst_index -= m;
          l.dst.block = nb;
          l.dst.local = dir.table(l.src.block).end(l.src.local).remote.local;
        }
      }
      for (auto& r : refs)
        if (r.second == b && r.first > m) {
          r.first -= m;
          r.second = nb;
        }
    } else if (op == 6) {
      // Merge two blocks of the same side.
      const bool parent = rng() % 2;
      const auto all = parent ? parents : children;
      if (all.size() < 2) continue;
      const block_id l_id = all[rng() % all.size()];
      block_id r_id = all[rng() % all.size()];
      if (l_id == r_id) continue;
      const uint32_t off = len[l_id];
      relocate_on_merge(dir, l_id, dir.table(l_id), r_id, dir.table(r_id), off);
      for (auto& l : links) {
        if (l.src.block == r_id) {
          l.src_index += off;
          l.src.block = l_id;
          l.src.local = dir.table(l.dst.block).end(l.dst.local).remote.local;
        }
        if (l.dst.block == r_id) {
          l.dst_index += off;
          l.dst.block = l_id;
          l.dst.local = dir.table(l.src.block).end(l.src.local).remote.local;
        }
      }
      for (auto& r : refs)
        if (r.second == r_id) {
          r.first += off;
          r.second = l_id;
        }
      len[l_id] += len[r_id];
      REQUIRE(dir.table(r_id).live_ids().empty());
      len.erase(r_id);
      dir.tables.erase(r_id);
    }
    verify(dir, links, refs);
  }
  CHECK(links.size() > 10);
  CHECK(refs.size() > 10);
}
