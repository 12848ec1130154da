#pragma once

// Sampling the lazy torus shuffle, its two-step 3-Monte form, matching
// extraction, and the reference Knuth shuffles.

#include <array>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "toruslab/grid.hpp"
#include "toruslab/rng.hpp"

namespace toruslab {

/// Lazy torus-shuffle move: Hold with probability 1/2, otherwise one of the
/// 4n rotations, each with probability 1/(8n).
Move sample_move(int n, ShuffleStream& stream);

/// Decodes a draw u in [0, 8n) the same way sample_move does.
Move move_from_draw(int n, std::uint64_t u);

/// Anything that can feed moves and Bernoulli(1/2) bits to the chains.
template <class S>
concept MoveSource = requires(S& s, int n) {
  { s.next_move(n) } -> std::convertible_to<Move>;
  { s.next_bit() } -> std::convertible_to<bool>;
};

/// Random moves drawn from a ShuffleStream.
class RandomMoves {
 public:
  explicit RandomMoves(ShuffleStream& stream) : stream_(&stream) {}
  Move next_move(int n) { return sample_move(n, *stream_); }
  bool next_bit() { return stream_->coin(); }

 private:
  ShuffleStream* stream_;
};

/// Replays a fixed script; throws std::out_of_range once it runs dry.
class ScriptedMoves {
 public:
  ScriptedMoves(std::vector<Move> moves, std::vector<bool> bits)
      : moves_(std::move(moves)), bits_(std::move(bits)) {}

  Move next_move(int) {
    if (move_at_ >= moves_.size()) throw std::out_of_range("scripted moves exhausted");
    return moves_[move_at_++];
  }
  bool next_bit() {
    if (bit_at_ >= bits_.size()) throw std::out_of_range("scripted bits exhausted");
    return bits_[bit_at_++];
  }

 private:
  std::vector<Move> moves_;
  std::vector<bool> bits_;
  std::size_t move_at_ = 0;
  std::size_t bit_at_ = 0;
};

/// A recorded 3-collision of the two-step chain. `triple` holds positions
/// (middle, front, back): middle is the row/column intersection and the
/// 3-cycle moves the content of middle to front, front to back and back to
/// middle. Positions are those after the base moves, before the cycle.
struct CollisionEvent {
  int time = 0;
  std::array<int, 3> triple{};
  bool outcome = false;
};

/// For every (row, column, row direction, column direction) the 3-cycle that,
/// applied after "row then column", gives "column then row". Its support is
/// the support of commutator_gamma.
class CollisionTable {
 public:
  explicit CollisionTable(int n);

  int n() const { return n_; }
  const std::array<int, 3>& triple(const Move& row, const Move& col) const;

 private:
  std::size_t slot(const Move& row, const Move& col) const;

  int n_;
  std::vector<std::array<int, 3>> triples_;
};

/// One step of the two-step 3-Monte chain with both moves and the collision
/// bit already drawn. Returns the collision event when a and b are one row
/// and one column rotation.
std::optional<CollisionEvent> two_step_apply(GridPerm& state, const Move& a, const Move& b,
                                             bool outcome, const CollisionTable& table, int time = 0);

/// Draws two lazy moves; if they are one row move r and one column move c (in
/// either order) applies r then c and, with probability 1/2, the collision
/// cycle, which turns the result into c then r. Otherwise applies the two
/// moves in order.
template <MoveSource S>
std::optional<CollisionEvent> two_step_3monte(GridPerm& state, S& source, const CollisionTable& table,
                                              int time = 0) {
  const Move a = source.next_move(state.n());
  const Move b = source.next_move(state.n());
  const bool mixed = (a.is_row() && b.is_col()) || (a.is_col() && b.is_row());
  const bool outcome = mixed ? static_cast<bool>(source.next_bit()) : false;
  return two_step_apply(state, a, b, outcome, table, time);
}

inline std::pair<GridPerm, std::optional<CollisionEvent>> two_step_3monte(GridPerm state, ShuffleStream& stream) {
  const CollisionTable table(state.n());
  RandomMoves source(stream);
  auto ev = two_step_3monte(state, source, table);
  return {std::move(state), ev};
}

/// t moves of the lazy torus shuffle applied left to right.
template <MoveSource S>
GridPerm run_chain(GridPerm start, long long t, S& source) {
  for (long long s = 0; s < t; ++s) start.apply(source.next_move(start.n()));
  return start;
}

inline GridPerm run_chain(GridPerm start, long long t, ShuffleStream& stream) {
  RandomMoves source(stream);
  return run_chain(std::move(start), t, source);
}

/// Coordinates of a handful of tiles, updated in O(1) per move.
template <std::size_t K>
class TileTracker {
 public:
  TileTracker(int n, const std::array<int, K>& tiles) : n_(n) {
    for (std::size_t i = 0; i < K; ++i) pos_[i] = tiles[i];
  }

  int n() const { return n_; }
  int pos(std::size_t i) const { return pos_[i]; }
  Coord coord(std::size_t i) const { return coord_of(pos_[i], n_); }

  void apply(const Move& m) {
    if (m.is_hold()) return;
    for (auto& p : pos_) {
      if (m.axis == Axis::Row) {
        if (p / n_ == m.index) p = m.index * n_ + wrap(p % n_ + m.direction, n_);
      } else if (p % n_ == m.index) {
        p = wrap(p / n_ + m.direction, n_) * n_ + m.index;
      }
    }
  }

  void apply_cycle(const std::array<int, 3>& cycle) {
    for (auto& p : pos_) {
      if (p == cycle[0]) p = cycle[1];
      else if (p == cycle[1]) p = cycle[2];
      else if (p == cycle[2]) p = cycle[0];
    }
  }

  /// Index s in {0,1,2} with cycle[s] == pos(i), or -1.
  int slot_in(const std::array<int, 3>& cycle, std::size_t i) const {
    for (int s = 0; s < 3; ++s) {
      if (cycle[static_cast<std::size_t>(s)] == pos_[i]) return s;
    }
    return -1;
  }

 private:
  int n_;
  std::array<int, K> pos_{};
};

/// Matching of focus tile x against (y, z) over the window {T, ..., t} of the
/// two-step 3-Monte chain started from the identity.
struct MatchOutcome {
  std::array<int, 3> focus{};   // tiles (x, y, z)
  int T = 0;                    // window start
  std::optional<int> t_xyz;     // first collision in the window touching x, y or z
  int m1 = 0;                   // front match of x (x itself when unmatched)
  int m2 = 0;                   // back match of x
  bool x_middle = false;        // matched with x at the corner of the L

  bool matched() const { return m1 != focus[0]; }
};

/// Follows the first collision in {T, ..., t} that touches x, y or z. If it is
/// a collision of (x, y, z) in that cyclic role order, y and z become the
/// front and back matches of x; otherwise x stays unmatched. Throws
/// std::domain_error for repeated tiles.
template <MoveSource S>
MatchOutcome trace_matching(int n, const std::array<int, 3>& focus, int T, int t, S& source,
                            const CollisionTable& table) {
  if (focus[0] == focus[1] || focus[0] == focus[2] || focus[1] == focus[2]) {
    throw std::domain_error("trace_matching needs three distinct tiles");
  }
  for (int f : focus) {
    if (f < 0 || f >= n * n) throw std::domain_error("trace_matching: tile out of range");
  }
  MatchOutcome out;
  out.focus = focus;
  out.T = T;
  out.m1 = out.m2 = focus[0];
  if (t < T) return out;

  TileTracker<3> tracker(n, focus);
  for (int time = 1; time <= t; ++time) {
    const Move a = source.next_move(n);
    const Move b = source.next_move(n);
    const bool mixed = (a.is_row() && b.is_col()) || (a.is_col() && b.is_row());
    if (!mixed) {
      tracker.apply(a);
      tracker.apply(b);
      continue;
    }
    const Move& r = a.is_row() ? a : b;
    const Move& c = a.is_row() ? b : a;
    tracker.apply(r);
    tracker.apply(c);
    const bool bit = source.next_bit();
    const auto& cyc = table.triple(r, c);
    if (time >= T) {
      const int sx = tracker.slot_in(cyc, 0);
      const int sy = tracker.slot_in(cyc, 1);
      const int sz = tracker.slot_in(cyc, 2);
      if (sx >= 0 || sy >= 0 || sz >= 0) {
        out.t_xyz = time;
        if (sx >= 0 && sy == (sx + 1) % 3 && sz == (sx + 2) % 3) {
          out.m1 = focus[1];
          out.m2 = focus[2];
          out.x_middle = sx == 0;
        }
        return out;
      }
    }
    if (bit) tracker.apply_cycle(cyc);
  }
  return out;
}

inline MatchOutcome trace_matching(int n, const std::array<int, 3>& focus, int T, int t, ShuffleStream& stream) {
  const CollisionTable table(n);
  RandomMoves source(stream);
  return trace_matching(n, focus, T, t, source, table);
}

/// Front/back matches of a single card x, derived from the full state: the
/// first collision in the window touching x matches it iff neither partner
/// was touched by an earlier collision in the window.
struct CardMatch {
  std::optional<int> time;  // first window collision touching x
  int m1 = 0;
  int m2 = 0;
  bool x_middle = false;
};

template <MoveSource S>
CardMatch card_match(int n, int x, int T, int t, S& source, const CollisionTable& table) {
  CardMatch out;
  out.m1 = out.m2 = x;
  if (t < T) return out;
  GridPerm state(n);
  std::vector<char> touched(static_cast<std::size_t>(n) * n, 0);
  for (int time = 1; time <= t; ++time) {
    auto ev = two_step_3monte(state, source, table, time);
    if (!ev) continue;
    // two_step_3monte has already applied the outcome; undo it to read the
    // occupants at collision time.
    const auto& c = ev->triple;
    std::array<int, 3> who{};
    if (ev->outcome) {
      who = {state.tile_at(c[1]), state.tile_at(c[2]), state.tile_at(c[0])};
    } else {
      who = {state.tile_at(c[0]), state.tile_at(c[1]), state.tile_at(c[2])};
    }
    if (time < T) continue;
    for (int s = 0; s < 3; ++s) {
      if (who[static_cast<std::size_t>(s)] != x) continue;
      out.time = time;
      const int y = who[static_cast<std::size_t>((s + 1) % 3)];
      const int z = who[static_cast<std::size_t>((s + 2) % 3)];
      if (!touched[static_cast<std::size_t>(y)] && !touched[static_cast<std::size_t>(z)]) {
        out.m1 = y;
        out.m2 = z;
        out.x_middle = s == 0;
      }
      return out;
    }
    for (int w : who) touched[static_cast<std::size_t>(w)] = 1;
  }
  return out;
}

/// Fisher-Yates on {0, ..., n-1}, returned as deck[position] = card. For i
/// from the bottom position up, swaps position i with a uniform position in
/// {0, ..., i}. `rng` needs below(bound).
template <class Rng>
std::vector<int> knuth_shuffle(int n, Rng& rng) {
  if (n < 1) throw std::domain_error("knuth_shuffle needs n >= 1");
  std::vector<int> deck(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) deck[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i >= 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(deck[static_cast<std::size_t>(i)], deck[j]);
  }
  return deck;
}

/// Knuth's shuffle built from 3-cycles. For i from the bottom position down
/// to the third: a uniform position j in {0, ..., i} supplies the card for
/// position i; if j != i the 3-cycle (j, i, a) is applied, with a the smallest
/// of the top three positions other than i and j. The result has the sign of
/// `start`. Throws std::domain_error for n < 3.
template <class Rng>
std::vector<int> modified_knuth_shuffle(int n, std::vector<int> deck, Rng& rng) {
  if (n < 3) throw std::domain_error("modified_knuth_shuffle needs n >= 3");
  if (static_cast<int>(deck.size()) != n) throw std::domain_error("start deck has wrong length");
  for (int i = n - 1; i >= 2; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    if (j == i) continue;
    int a = 0;
    while (a == i || a == j) ++a;
    // content of j -> i, i -> a, a -> j
    const int cj = deck[static_cast<std::size_t>(j)];
    const int ci = deck[static_cast<std::size_t>(i)];
    const int ca = deck[static_cast<std::size_t>(a)];
    deck[static_cast<std::size_t>(i)] = cj;
    deck[static_cast<std::size_t>(a)] = ci;
    deck[static_cast<std::size_t>(j)] = ca;
  }
  return deck;
}

}  // namespace toruslab
