#pragma once

// Permutation algebra on the n x n discrete torus.
//
// Conventions used throughout the library:
//   * Positions are 0-indexed, p = y * n + x, with x the column (eastward)
//     and y the row (northward).
//   * Tile t is the tile that starts at position t.
//   * A Rotate move with direction +1 shifts a row eastward (x -> x+1) or a
//     column northward (y -> y+1); direction -1 is the opposite shift.
//   * Products are read left to right: compose(p, q) applies p, then q.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace toruslab {

struct Coord {
  int x = 0;
  int y = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
};

enum class Axis : std::uint8_t { Row, Col };

struct Move {
  enum class Kind : std::uint8_t { Hold, Rotate };

  Kind kind = Kind::Hold;
  Axis axis = Axis::Row;
  int index = 0;
  int direction = 0;

  static Move hold() { return {}; }
  static Move rotate(Axis axis, int index, int direction);

  bool is_hold() const { return kind == Kind::Hold; }
  bool is_row() const { return kind == Kind::Rotate && axis == Axis::Row; }
  bool is_col() const { return kind == Kind::Rotate && axis == Axis::Col; }

  friend bool operator==(const Move&, const Move&) = default;
};

/// The move that undoes m (same line, opposite direction).
Move inverse(const Move& m);

/// Throws std::domain_error if m is not a legal move on an n x n torus.
void validate(const Move& m, int n);

std::string to_string(const Move& m);

inline int pos_index(Coord c, int n) { return c.y * n + c.x; }
inline Coord coord_of(int pos, int n) { return {pos % n, pos / n}; }
inline int wrap(int v, int n) {
  const int r = v % n;
  return r < 0 ? r + n : r;
}

/// Where the content of `c` ends up after move m.
Coord moved_coord(Coord c, const Move& m, int n);

/// A permutation of the n*n tiles, held as two mutually inverse arrays.
class GridPerm {
 public:
  /// Identity arrangement on an n x n grid (n >= 2).
  explicit GridPerm(int n);

  /// Builds a state from its position -> tile view. Throws std::domain_error
  /// if `tile_at` is not a permutation of {0, ..., n*n-1}.
  static GridPerm from_tile_at(int n, std::vector<int> tile_at);

  int n() const { return n_; }
  int size() const { return n_ * n_; }

  int tile_at(int pos) const { return tile_at_[static_cast<std::size_t>(pos)]; }
  int pos_of(int tile) const { return pos_of_[static_cast<std::size_t>(tile)]; }
  Coord coord_of_tile(int tile) const { return coord_of(pos_of(tile), n_); }

  std::span<const int> tiles() const { return tile_at_; }
  std::span<const int> positions() const { return pos_of_; }

  /// Applies m in place; O(n).
  void apply(const Move& m);

  /// Moves the content of a to b, b to c and c to a.
  void apply_cycle(const std::array<int, 3>& cycle);

  bool is_identity() const;

  /// Full scan: both views are permutations and mutually inverse.
  bool consistent() const;

  friend bool operator==(const GridPerm& a, const GridPerm& b) {
    return a.n_ == b.n_ && a.tile_at_ == b.tile_at_;
  }

 private:
  GridPerm(int n, std::vector<int> tile_at, std::vector<int> pos_of);

  int n_;
  std::vector<int> tile_at_;
  std::vector<int> pos_of_;
};

GridPerm apply_move(GridPerm p, const Move& m);

/// The permutation performed by a single move, started from the identity.
GridPerm move_perm(const Move& m, int n);

/// p first, then q. Throws std::domain_error on a size mismatch.
GridPerm compose(const GridPerm& p, const GridPerm& q);

GridPerm invert(const GridPerm& p);

/// +1 for even permutations, -1 for odd ones.
int sign(const GridPerm& p);

/// Positions whose content is moved by p, ascending.
std::vector<int> support(const GridPerm& p);

/// r^-1 c^-1 r c for a row rotation r and a column rotation c. The result is
/// a 3-cycle on an L-shaped triple of cells whose corner is the intersection
/// of r's row and c's column. Throws std::domain_error unless r is a row
/// rotation and c a column rotation.
GridPerm commutator_gamma(const Move& r, const Move& c, int n);

/// Shell labeling of the grid: the cells with max(x, y) < l carry exactly the
/// labels 1..l^2. Shell m starts at (0, m) with label m^2 + 1, walks east to
/// (m, m), then south to (m, 0), which gets (m + 1)^2.
class Labeling {
 public:
  explicit Labeling(int n);

  int n() const { return n_; }
  int to_label(Coord c) const;
  Coord to_coord(int label) const;

  /// The tile starting at the cell carrying `label`.
  int tile_of_label(int label) const { return pos_index(to_coord(label), n_); }
  int label_of_tile(int tile) const { return to_label(coord_of(tile, n_)); }

 private:
  int n_;
};

/// Label of c under the shell labeling; throws std::domain_error for an
/// out-of-range coordinate.
int label_of(Coord c, int n);

}  // namespace toruslab
