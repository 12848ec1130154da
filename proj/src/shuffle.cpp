#include "toruslab/shuffle.hpp"

#include <stdexcept>

namespace toruslab {

Move move_from_draw(int n, std::uint64_t u) {
  const auto rotations = static_cast<std::uint64_t>(4 * n);
  if (u < rotations) return Move::hold();
  const std::uint64_t idx = u - rotations;
  const auto per_axis = static_cast<std::uint64_t>(2 * n);
  const Axis axis = idx < per_axis ? Axis::Row : Axis::Col;
  const std::uint64_t rem = idx % per_axis;
  return Move::rotate(axis, static_cast<int>(rem / 2), (rem % 2) == 0 ? 1 : -1);
}

Move sample_move(int n, ShuffleStream& stream) {
  return move_from_draw(n, stream.below(static_cast<std::uint64_t>(8 * n)));
}

CollisionTable::CollisionTable(int n) : n_(n) {
  if (n < 2) throw std::domain_error("CollisionTable needs n >= 2");
  triples_.resize(static_cast<std::size_t>(4 * n * n));
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      for (int dr : {1, -1}) {
        for (int dc : {1, -1}) {
          const Move r = Move::rotate(Axis::Row, row, dr);
          const Move c = Move::rotate(Axis::Col, col, dc);
          GridPerm rc(n);
          rc.apply(r);
          rc.apply(c);
          GridPerm cr(n);
          cr.apply(c);
          cr.apply(r);
          const GridPerm cyc = compose(invert(rc), cr);
          const int middle = pos_index({col, row}, n);
          const int front = cyc.pos_of(middle);
          const int back = cyc.pos_of(front);
          if (support(cyc).size() != 3 || front == middle || cyc.pos_of(back) != middle) {
            throw std::logic_error("collision cycle is not a 3-cycle through the intersection");
          }
          triples_[slot(r, c)] = {middle, front, back};
        }
      }
    }
  }
}

std::size_t CollisionTable::slot(const Move& row, const Move& col) const {
  const int dr = row.direction > 0 ? 0 : 1;
  const int dc = col.direction > 0 ? 0 : 1;
  return static_cast<std::size_t>(((row.index * n_ + col.index) * 2 + dr) * 2 + dc);
}

const std::array<int, 3>& CollisionTable::triple(const Move& row, const Move& col) const {
  if (!row.is_row() || !col.is_col()) throw std::domain_error("CollisionTable::triple needs (row, col)");
  return triples_[slot(row, col)];
}

std::optional<CollisionEvent> two_step_apply(GridPerm& state, const Move& a, const Move& b, bool outcome,
                                             const CollisionTable& table, int time) {
  const bool mixed = (a.is_row() && b.is_col()) || (a.is_col() && b.is_row());
  if (!mixed) {
    state.apply(a);
    state.apply(b);
    return std::nullopt;
  }
  const Move& r = a.is_row() ? a : b;
  const Move& c = a.is_row() ? b : a;
  state.apply(r);
  state.apply(c);
  CollisionEvent ev;
  ev.time = time;
  ev.triple = table.triple(r, c);
  ev.outcome = outcome;
  if (outcome) state.apply_cycle(ev.triple);
  return ev;
}

}  // namespace toruslab
