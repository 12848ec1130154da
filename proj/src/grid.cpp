#include "toruslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace toruslab {

Move Move::rotate(Axis axis, int index, int direction) {
  if (direction != 1 && direction != -1) {
    throw std::domain_error("rotation direction must be +1 or -1");
  }
  Move m;
  m.kind = Kind::Rotate;
  m.axis = axis;
  m.index = index;
  m.direction = direction;
  return m;
}

Move inverse(const Move& m) {
  if (m.is_hold()) return m;
  return Move::rotate(m.axis, m.index, -m.direction);
}

void validate(const Move& m, int n) {
  if (m.is_hold()) return;
  if (m.index < 0 || m.index >= n) throw std::domain_error("move line index out of range");
  if (m.direction != 1 && m.direction != -1) throw std::domain_error("bad move direction");
}

std::string to_string(const Move& m) {
  if (m.is_hold()) return "hold";
  std::string s = m.axis == Axis::Row ? "row" : "col";
  s += std::to_string(m.index);
  s += m.direction > 0 ? "+" : "-";
  return s;
}

Coord moved_coord(Coord c, const Move& m, int n) {
  if (m.is_hold()) return c;
  if (m.axis == Axis::Row) {
    if (c.y == m.index) c.x = wrap(c.x + m.direction, n);
  } else if (c.x == m.index) {
    c.y = wrap(c.y + m.direction, n);
  }
  return c;
}

GridPerm::GridPerm(int n) : n_(n) {
  if (n < 2) throw std::domain_error("grid side must be at least 2");
  tile_at_.resize(static_cast<std::size_t>(n) * n);
  for (std::size_t p = 0; p < tile_at_.size(); ++p) tile_at_[p] = static_cast<int>(p);
  pos_of_ = tile_at_;
}

GridPerm::GridPerm(int n, std::vector<int> tile_at, std::vector<int> pos_of)
    : n_(n), tile_at_(std::move(tile_at)), pos_of_(std::move(pos_of)) {}

GridPerm GridPerm::from_tile_at(int n, std::vector<int> tile_at) {
  if (n < 2) throw std::domain_error("grid side must be at least 2");
  const int size = n * n;
  if (static_cast<int>(tile_at.size()) != size) throw std::domain_error("tile_at has wrong length");
  std::vector<int> pos_of(tile_at.size(), -1);
  for (int p = 0; p < size; ++p) {
    const int t = tile_at[static_cast<std::size_t>(p)];
    if (t < 0 || t >= size || pos_of[static_cast<std::size_t>(t)] != -1) {
      throw std::domain_error("tile_at is not a permutation");
    }
    pos_of[static_cast<std::size_t>(t)] = p;
  }
  return GridPerm(n, std::move(tile_at), std::move(pos_of));
}

void GridPerm::apply(const Move& m) {
  if (m.is_hold()) return;
  validate(m, n_);
  const int n = n_;
  // Gather the line in the order content flows, then write it back shifted.
  auto at = [&](int s) {
    return m.axis == Axis::Row ? m.index * n + s : s * n + m.index;
  };
  if (m.direction > 0) {
    const int last = tile_at_[static_cast<std::size_t>(at(n - 1))];
    for (int s = n - 1; s > 0; --s) tile_at_[static_cast<std::size_t>(at(s))] = tile_at_[static_cast<std::size_t>(at(s - 1))];
    tile_at_[static_cast<std::size_t>(at(0))] = last;
  } else {
    const int first = tile_at_[static_cast<std::size_t>(at(0))];
    for (int s = 0; s + 1 < n; ++s) tile_at_[static_cast<std::size_t>(at(s))] = tile_at_[static_cast<std::size_t>(at(s + 1))];
    tile_at_[static_cast<std::size_t>(at(n - 1))] = first;
  }
  for (int s = 0; s < n; ++s) {
    const int p = at(s);
    pos_of_[static_cast<std::size_t>(tile_at_[static_cast<std::size_t>(p)])] = p;
  }
}

void GridPerm::apply_cycle(const std::array<int, 3>& cycle) {
  const auto a = static_cast<std::size_t>(cycle[0]);
  const auto b = static_cast<std::size_t>(cycle[1]);
  const auto c = static_cast<std::size_t>(cycle[2]);
  const int ta = tile_at_[a];
  const int tb = tile_at_[b];
  const int tc = tile_at_[c];
  tile_at_[b] = ta;
  tile_at_[c] = tb;
  tile_at_[a] = tc;
  pos_of_[static_cast<std::size_t>(ta)] = cycle[1];
  pos_of_[static_cast<std::size_t>(tb)] = cycle[2];
  pos_of_[static_cast<std::size_t>(tc)] = cycle[0];
}

bool GridPerm::is_identity() const {
  for (std::size_t p = 0; p < tile_at_.size(); ++p) {
    if (tile_at_[p] != static_cast<int>(p)) return false;
  }
  return true;
}

bool GridPerm::consistent() const {
  const auto size = static_cast<int>(tile_at_.size());
  if (size != n_ * n_ || pos_of_.size() != tile_at_.size()) return false;
  std::vector<char> seen(tile_at_.size(), 0);
  for (int p = 0; p < size; ++p) {
    const int t = tile_at_[static_cast<std::size_t>(p)];
    if (t < 0 || t >= size || seen[static_cast<std::size_t>(t)]) return false;
    seen[static_cast<std::size_t>(t)] = 1;
    if (pos_of_[static_cast<std::size_t>(t)] != p) return false;
  }
  return true;
}

GridPerm apply_move(GridPerm p, const Move& m) {
  p.apply(m);
  return p;
}

GridPerm move_perm(const Move& m, int n) {
  validate(m, n);
  return apply_move(GridPerm(n), m);
}

GridPerm compose(const GridPerm& p, const GridPerm& q) {
  if (p.n() != q.n()) throw std::domain_error("compose: grid sizes differ");
  // Tile t sits at p.pos_of(t) after p; q then carries that position on.
  std::vector<int> tile_at(static_cast<std::size_t>(p.size()));
  for (int t = 0; t < p.size(); ++t) {
    tile_at[static_cast<std::size_t>(q.pos_of(p.pos_of(t)))] = t;
  }
  return GridPerm::from_tile_at(p.n(), std::move(tile_at));
}

GridPerm invert(const GridPerm& p) {
  std::vector<int> tile_at(p.positions().begin(), p.positions().end());
  return GridPerm::from_tile_at(p.n(), std::move(tile_at));
}

int sign(const GridPerm& p) {
  const int size = p.size();
  std::vector<char> seen(static_cast<std::size_t>(size), 0);
  int cycles = 0;
  for (int s = 0; s < size; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    ++cycles;
    for (int v = s; !seen[static_cast<std::size_t>(v)]; v = p.pos_of(v)) seen[static_cast<std::size_t>(v)] = 1;
  }
  return ((size - cycles) % 2 == 0) ? 1 : -1;
}

std::vector<int> support(const GridPerm& p) {
  std::vector<int> out;
  for (int pos = 0; pos < p.size(); ++pos) {
    if (p.tile_at(pos) != pos) out.push_back(pos);
  }
  return out;
}

GridPerm commutator_gamma(const Move& r, const Move& c, int n) {
  if (!r.is_row() || !c.is_col()) {
    throw std::domain_error("commutator_gamma needs a row rotation and a column rotation");
  }
  validate(r, n);
  validate(c, n);
  GridPerm g(n);
  g.apply(inverse(r));
  g.apply(inverse(c));
  g.apply(r);
  g.apply(c);
  return g;
}

Labeling::Labeling(int n) : n_(n) {
  if (n < 1) throw std::domain_error("labeling needs n >= 1");
}

int Labeling::to_label(Coord c) const { return label_of(c, n_); }

Coord Labeling::to_coord(int label) const {
  if (label < 1 || label > n_ * n_) throw std::domain_error("label out of range");
  int m = static_cast<int>(std::sqrt(static_cast<double>(label - 1)));
  while (m * m > label - 1) --m;
  while ((m + 1) * (m + 1) <= label - 1) ++m;
  const int offset = label - 1 - m * m;
  if (offset <= m) return {offset, m};
  return {m, m - (offset - m)};
}

int label_of(Coord c, int n) {
  if (c.x < 0 || c.y < 0 || c.x >= n || c.y >= n) throw std::domain_error("coordinate out of range");
  const int m = std::max(c.x, c.y);
  if (c.y == m) return m * m + 1 + c.x;
  return m * m + 1 + m + (m - c.y);
}

}  // namespace toruslab
