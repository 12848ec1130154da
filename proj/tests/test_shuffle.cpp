#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "toruslab/exact.hpp"
#include "toruslab/grid.hpp"
#include "toruslab/lehmer.hpp"
#include "toruslab/rng.hpp"
#include "toruslab/shuffle.hpp"

using namespace toruslab;

namespace {

// Upper 0.1% point of chi-square (Wilson-Hilferty).
double chi2_crit_001(int df) {
  const double z = 3.090232306167813;
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

template <class Counts>
double chi2(const Counts& counts, double expected) {
  double s = 0.0;
  for (const auto& c : counts) {
    const double d = static_cast<double>(c) - expected;
    s += d * d / expected;
  }
  return s;
}

// Plays back a fixed list of below() results.
struct ScriptRng {
  std::vector<std::uint64_t> draws;
  std::size_t at = 0;
  std::uint64_t below(std::uint64_t bound) {
    const auto v = draws.at(at++);
    REQUIRE(v < bound);
    return v;
  }
};

std::vector<Move> rotations(int n) {
  std::vector<Move> out;
  for (Axis a : {Axis::Row, Axis::Col})
    for (int i = 0; i < n; ++i)
      for (int d : {+1, -1}) out.push_back(Move::rotate(a, i, d));
  return out;
}

GridPerm random_state(int n, ShuffleStream& s) { return run_chain(GridPerm(n), 40 * n, s); }

}  // namespace

TEST_CASE("decoding a draw covers each rotation exactly twice out of 8n") {
  for (int n = 2; n <= 6; ++n) {
    int holds = 0;
    std::map<std::tuple<int, int, int>, int> seen;
    for (std::uint64_t u = 0; u < static_cast<std::uint64_t>(8 * n); ++u) {
      const Move m = move_from_draw(n, u);
      if (m.is_hold()) {
        ++holds;
        continue;
      }
      validate(m, n);
      ++seen[{static_cast<int>(m.axis), m.index, m.direction}];
    }
    CHECK(holds == 4 * n);
    CHECK(seen.size() == static_cast<std::size_t>(4 * n));
    for (const auto& [k, v] : seen) CHECK(v == 1);
  }
}

TEST_CASE("hold frequency and rotation balance") {
  const int n = 4;
  ShuffleStream s(2024, 0);
  const int draws = 1000000;
  int holds = 0;
  std::map<std::tuple<int, int, int>, long> counts;
  for (int i = 0; i < draws; ++i) {
    const Move m = sample_move(n, s);
    if (m.is_hold()) ++holds;
    else ++counts[{static_cast<int>(m.axis), m.index, m.direction}];
  }
  CHECK(std::abs(holds / double(draws) - 0.5) <= 0.002);
  REQUIRE(counts.size() == 16);
  std::vector<long> v;
  long total = 0;
  for (const auto& [k, c] : counts) {
    v.push_back(c);
    total += c;
  }
  CHECK(chi2(v, total / 16.0) < chi2_crit_001(15));
}

TEST_CASE("zero steps return the start; identical streams give identical runs") {
  ShuffleStream a(7, 3), b(7, 3), c(7, 4);
  GridPerm start(5);
  CHECK(run_chain(start, 0, a) == start);
  const GridPerm ra = run_chain(start, 500, a);
  const GridPerm rb = run_chain(start, 500, b);
  const GridPerm rc = run_chain(start, 500, c);
  CHECK(ra == rb);
  CHECK_FALSE(ra == rc);
}

TEST_CASE("odd sizes never change the sign") {
  for (int n : {3, 5, 7}) {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
      ShuffleStream s(99, trial);
      GridPerm p = run_chain(GridPerm(n), 1 + s.below(300), s);
      CHECK(sign(p) == 1);
      auto [q, ev] = two_step_3monte(p, s);
      CHECK(sign(q) == 1);
    }
  }
}

TEST_CASE("n = 2 empirical law after 50 steps matches the exact law") {
  const auto cls = enumerate_reachable(2);
  const auto law = exact_evolve(cls, 50);
  const int samples = 200000;
  std::vector<long> counts(cls.size(), 0);
  for (int i = 0; i < samples; ++i) {
    ShuffleStream s(17, static_cast<std::uint64_t>(i));
    const GridPerm p = run_chain(GridPerm(2), 50, s);
    std::vector<int> tiles(p.tiles().begin(), p.tiles().end());
    const long long idx = cls.index_of(tiles);
    REQUIRE(idx >= 0);
    ++counts[static_cast<std::size_t>(idx)];
  }
  for (std::size_t k = 0; k < cls.size(); ++k) {
    const double p = law[k];
    const double sd = std::sqrt(p * (1 - p) / samples);
    CHECK(std::abs(counts[k] / double(samples) - p) <= 3 * sd);
  }
}

TEST_CASE("two holds change nothing") {
  const CollisionTable table(4);
  GridPerm p(4);
  ShuffleStream s(1, 1);
  p = random_state(4, s);
  const GridPerm before = p;
  CHECK_FALSE(two_step_apply(p, Move::hold(), Move::hold(), true, table).has_value());
  CHECK(p == before);
}

TEST_CASE("a fired collision turns row-then-column into column-then-row") {
  for (int n : {3, 4}) {
    const CollisionTable table(n);
    ShuffleStream s(5, static_cast<std::uint64_t>(n));
    const auto rots = rotations(n);
    for (const Move& r : rots) {
      if (!r.is_row()) continue;
      for (const Move& c : rots) {
        if (!c.is_col()) continue;
        const GridPerm start = random_state(n, s);
        GridPerm rc = start, cr = start;
        rc.apply(r);
        rc.apply(c);
        cr.apply(c);
        cr.apply(r);

        for (bool col_first : {false, true}) {
          GridPerm fired = start, idle = start;
          const Move& a = col_first ? c : r;
          const Move& b = col_first ? r : c;
          const auto ev1 = two_step_apply(fired, a, b, true, table, 3);
          const auto ev0 = two_step_apply(idle, a, b, false, table, 3);
          REQUIRE(ev1.has_value());
          REQUIRE(ev0.has_value());
          CHECK(fired == cr);
          CHECK(idle == rc);
          CHECK(ev1->outcome);
          CHECK(ev1->time == 3);
          CHECK(ev1->triple[0] == pos_index({c.index, r.index}, n));
          std::vector<int> cells(ev1->triple.begin(), ev1->triple.end());
          std::sort(cells.begin(), cells.end());
          CHECK(cells == support(commutator_gamma(r, c, n)));
        }
      }
    }
  }
}

TEST_CASE("same-axis pairs apply in order without an event") {
  const int n = 4;
  const CollisionTable table(n);
  const Move a = Move::rotate(Axis::Row, 1, 1), b = Move::rotate(Axis::Row, 2, -1);
  const Move c = Move::rotate(Axis::Col, 0, 1);
  GridPerm p(n);
  CHECK_FALSE(two_step_apply(p, a, b, true, table).has_value());
  CHECK_FALSE(two_step_apply(p, c, Move::hold(), true, table).has_value());
  GridPerm q(n);
  q.apply(a);
  q.apply(b);
  q.apply(c);
  CHECK(p == q);
}

TEST_CASE("tile tracker follows the full state") {
  const int n = 5;
  ShuffleStream s(8, 0);
  GridPerm p(n);
  TileTracker<3> tr(n, {0, 7, 24});
  const CollisionTable table(n);
  for (int step = 0; step < 2000; ++step) {
    const Move m = sample_move(n, s);
    p.apply(m);
    tr.apply(m);
    if (step % 17 == 0) {
      const Move r = Move::rotate(Axis::Row, int(s.below(n)), 1);
      const Move c = Move::rotate(Axis::Col, int(s.below(n)), -1);
      const auto& cyc = table.triple(r, c);
      p.apply_cycle(cyc);
      tr.apply_cycle(cyc);
    }
    REQUIRE(tr.pos(0) == p.pos_of(0));
    REQUIRE(tr.pos(1) == p.pos_of(7));
    REQUIRE(tr.pos(2) == p.pos_of(24));
  }
}

TEST_CASE("scripted matching cases") {
  const int n = 4;
  const CollisionTable table(n);
  const Move r = Move::rotate(Axis::Row, 1, 1);
  const Move c = Move::rotate(Axis::Col, 2, -1);
  GridPerm after(n);
  after.apply(r);
  after.apply(c);
  const auto& tri = table.triple(r, c);
  const int x = after.tile_at(tri[0]);
  const int y = after.tile_at(tri[1]);
  const int z = after.tile_at(tri[2]);
  int other1 = -1, other2 = -1;
  for (int t = 0; t < n * n && other2 < 0; ++t) {
    if (t == x || t == y || t == z) continue;
    if (other1 < 0) other1 = t;
    else other2 = t;
  }

  SUBCASE("collision of (x, y, z) in role order") {
    ScriptedMoves src({c, r}, {false});
    const auto m = trace_matching(n, {x, y, z}, 1, 1, src, table);
    CHECK(m.matched());
    CHECK(m.m1 == y);
    CHECK(m.m2 == z);
    CHECK(m.x_middle);
    CHECK(m.t_xyz == 1);
  }
  SUBCASE("rotated roles still match, x not in the middle") {
    ScriptedMoves src({r, c}, {true});
    const auto m = trace_matching(n, {y, z, x}, 1, 1, src, table);
    CHECK(m.m1 == z);
    CHECK(m.m2 == x);
    CHECK_FALSE(m.x_middle);
  }
  SUBCASE("reversed order is not a match") {
    ScriptedMoves src({r, c}, {false});
    const auto m = trace_matching(n, {x, z, y}, 1, 1, src, table);
    CHECK_FALSE(m.matched());
    CHECK(m.t_xyz == 1);
  }
  SUBCASE("x collides with two outsiders") {
    ScriptedMoves src({r, c}, {false});
    const auto m = trace_matching(n, {x, other1, other2}, 1, 1, src, table);
    CHECK_FALSE(m.matched());
    CHECK(m.m1 == x);
    CHECK(m.m2 == x);
    CHECK(m.t_xyz == 1);
  }
  SUBCASE("collisions before the window are ignored") {
    ScriptedMoves src({r, c, Move::hold(), Move::hold()}, {false});
    const auto m = trace_matching(n, {x, y, z}, 2, 2, src, table);
    CHECK_FALSE(m.matched());
    CHECK_FALSE(m.t_xyz.has_value());
  }
  SUBCASE("empty window") {
    ScriptedMoves src({}, {});
    const auto m = trace_matching(n, {x, y, z}, 5, 4, src, table);
    CHECK_FALSE(m.matched());
  }
  ScriptedMoves none({}, {});
  CHECK_THROWS_AS(trace_matching(n, std::array<int, 3>{x, x, z}, 1, 1, none, table),
                  std::domain_error);
}

TEST_CASE("single-card matching agrees with triple tracing") {
  const int n = 4;
  const CollisionTable table(n);
  int matched = 0;
  for (std::uint64_t trial = 0; trial < 3000; ++trial) {
    const int x = static_cast<int>(trial % 16);
    ShuffleStream s1(31, trial), s2(31, trial);
    RandomMoves a(s1), b(s2);
    const auto cm = card_match(n, x, 5, 40, a, table);
    if (cm.m1 != x) {
      ++matched;
      const auto tm = trace_matching(n, {x, cm.m1, cm.m2}, 5, 40, b, table);
      CHECK(tm.matched());
      CHECK(tm.m1 == cm.m1);
      CHECK(tm.m2 == cm.m2);
      CHECK(tm.x_middle == cm.x_middle);
      CHECK(tm.t_xyz == cm.time);
    } else {
      const int y = (x + 1) % 16, z = (x + 5) % 16;
      const auto tm = trace_matching(n, {x, y, z}, 5, 40, b, table);
      CHECK_FALSE(tm.matched());
    }
  }
  CHECK(matched > 100);
}

TEST_CASE("knuth shuffle choice tree is exactly uniform at n = 4") {
  std::map<std::vector<int>, int> seen;
  for (std::uint64_t a = 0; a < 4; ++a)
    for (std::uint64_t b = 0; b < 3; ++b)
      for (std::uint64_t c = 0; c < 2; ++c) {
        ScriptRng rng{{a, b, c}};
        ++seen[knuth_shuffle(4, rng)];
      }
  CHECK(seen.size() == 24);
  for (const auto& [p, k] : seen) CHECK(k == 1);

  ScriptRng one{{}};
  CHECK(knuth_shuffle(1, one) == std::vector<int>{0});
}

TEST_CASE("knuth shuffle chi-square at n = 6") {
  ShuffleStream s(6, 6);
  std::vector<long> counts(720, 0);
  const int samples = 1000000;
  for (int i = 0; i < samples; ++i) {
    const auto d = knuth_shuffle(6, s);
    ++counts[lehmer_rank(d)];
  }
  CHECK(chi2(counts, samples / 720.0) < chi2_crit_001(719));
}

TEST_CASE("modified knuth shuffle") {
  SUBCASE("choices that never move return the start") {
    ScriptRng rng{{4, 3, 2}};
    CHECK(modified_knuth_shuffle(5, {0, 1, 2, 3, 4}, rng) == std::vector<int>{0, 1, 2, 3, 4});
  }
  SUBCASE("sign is preserved") {
    ShuffleStream s(3, 1);
    for (int rep = 0; rep < 200; ++rep) {
      const int n = 3 + static_cast<int>(s.below(6));
      std::vector<int> start(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) start[static_cast<std::size_t>(i)] = i;
      if (s.coin()) std::swap(start[0], start[static_cast<std::size_t>(n - 1)]);
      const auto out = modified_knuth_shuffle(n, start, s);
      CHECK(perm_sign(out) == perm_sign(start));
    }
  }
  SUBCASE("sign-balanced start gives the uniform law on S4") {
    std::map<std::vector<int>, int> seen;
    for (const std::vector<int>& start : {std::vector<int>{0, 1, 2, 3}, std::vector<int>{1, 0, 2, 3}})
      for (std::uint64_t a = 0; a < 4; ++a)
        for (std::uint64_t b = 0; b < 3; ++b) {
          ScriptRng rng{{a, b}};
          ++seen[modified_knuth_shuffle(4, start, rng)];
        }
    CHECK(seen.size() == 24);
    for (const auto& [p, k] : seen) CHECK(k == 1);
  }
  ShuffleStream s(1, 1);
  CHECK_THROWS_AS(modified_knuth_shuffle(2, {0, 1}, s), std::domain_error);
  CHECK_THROWS_AS(modified_knuth_shuffle(4, {0, 1, 2}, s), std::domain_error);
}
