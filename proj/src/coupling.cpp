#include "toruslab/coupling.hpp"

#include <cmath>
#include <stdexcept>

#include "toruslab/parallel.hpp"

namespace toruslab {

namespace {

bool share_line(Coord a, Coord b) { return a.x == b.x || a.y == b.y; }

int reduce_half(int d, int n) {
  int r = wrap(d, n);
  if (r > n / 2) r -= n;
  return r;
}

// Lazily generated increment sequence m_1, m_2, ... of one focus tile.
class IncrementSequence {
 public:
  explicit IncrementSequence(ShuffleStream stream) : stream_(std::move(stream)) {}

  // 0-based: q-th increment is m_{q+1}
  int at(long long q) {
    while (static_cast<long long>(dirs_.size()) <= q) dirs_.push_back(static_cast<int>(stream_.below(4)));
    return dirs_[static_cast<std::size_t>(q)];
  }

 private:
  ShuffleStream stream_;
  std::vector<int> dirs_;
};

struct Long2 {
  long long x = 0;
  long long y = 0;
};

Move move_for(Coord master_at, int dir) {
  switch (dir) {
    case 0: return Move::rotate(Axis::Row, master_at.y, 1);
    case 1: return Move::rotate(Axis::Row, master_at.y, -1);
    case 2: return Move::rotate(Axis::Col, master_at.x, 1);
    default: return Move::rotate(Axis::Col, master_at.x, -1);
  }
}

MeanReport to_report(const RunningStats& s) { return {s.mean(), s.stderr_mean(), s.count()}; }

}  // namespace

Coord increment_of(int dir) {
  switch (dir) {
    case 0: return {1, 0};
    case 1: return {-1, 0};
    case 2: return {0, 1};
    case 3: return {0, -1};
    default: throw std::domain_error("direction must be in 0..3");
  }
}

std::vector<int> select_master_tiles(const GridPerm& p, const std::array<int, 3>& focus) {
  const int n = p.n();
  if (focus[0] == focus[1] || focus[0] == focus[2] || focus[1] == focus[2]) {
    throw std::domain_error("focus tiles must be distinct");
  }
  std::vector<int> master(static_cast<std::size_t>(n), -1);
  std::vector<char> col_used(static_cast<std::size_t>(n), 0);
  auto add = [&](int tile) {
    const Coord c = p.coord_of_tile(tile);
    master[static_cast<std::size_t>(c.y)] = tile;
    col_used[static_cast<std::size_t>(c.x)] = 1;
  };
  const Coord ci = p.coord_of_tile(focus[0]);
  const Coord cj = p.coord_of_tile(focus[1]);
  const Coord ck = p.coord_of_tile(focus[2]);
  add(focus[0]);
  if (!share_line(cj, ci)) add(focus[1]);
  if (!share_line(ck, ci) && !share_line(ck, cj)) add(focus[2]);
  int col = 0;
  for (int row = 0; row < n; ++row) {
    if (master[static_cast<std::size_t>(row)] >= 0) continue;
    while (col_used[static_cast<std::size_t>(col)]) ++col;
    col_used[static_cast<std::size_t>(col)] = 1;
    master[static_cast<std::size_t>(row)] = p.tile_at(pos_index({col, row}, n));
  }
  return master;
}

std::optional<int> idealized_length(int n, long long t) {
  if (t <= 0 || t % (2LL * n) != 0) return std::nullopt;
  const long long sq = t / (2LL * n);
  const auto l = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(sq))));
  if (l * l != sq) return std::nullopt;
  return static_cast<int>(l);
}

TrajectoryStats run_coupled(int n, long long t, const std::array<int, 3>& focus, ShuffleStream& stream) {
  return run_coupled(GridPerm(n), t, focus, stream);
}

TrajectoryStats run_coupled(const GridPerm& start, long long t, const std::array<int, 3>& focus,
                            ShuffleStream& stream) {
  const int n = start.n();
  if (n < 4) throw std::domain_error("run_coupled needs n >= 4");
  if (t < 0) throw std::domain_error("negative step count");
  for (int f : focus) {
    if (f < 0 || f >= n * n) throw std::domain_error("focus tile out of range");
  }
  if (focus[0] == focus[1] || focus[0] == focus[2] || focus[1] == focus[2]) {
    throw std::domain_error("focus tiles must be distinct");
  }

  TrajectoryStats st;
  st.focus = focus;
  st.steps = t;
  GridPerm state = start;
  std::array<IncrementSequence, 3> inc{IncrementSequence(stream.substream(1)),
                                       IncrementSequence(stream.substream(2)),
                                       IncrementSequence(stream.substream(3))};
  std::array<Coord, 3> x0{};
  std::array<Long2, 3> xu{}, yu{};
  for (std::size_t f = 0; f < 3; ++f) {
    x0[f] = state.coord_of_tile(focus[f]);
    xu[f] = yu[f] = {x0[f].x, x0[f].y};
  }

  Long2 d{reduce_half(x0[0].x - x0[2].x, n), reduce_half(x0[0].y - x0[2].y, n)};
  const double two_n = 2.0 * n;
  st.m_start = static_cast<double>(std::llabs(d.x) + std::llabs(d.y));
  st.v1_start = static_cast<double>(d.x * d.x);

  for (long long s = 0; s < t; ++s) {
    std::array<Coord, 3> c{};
    for (std::size_t f = 0; f < 3; ++f) c[f] = state.coord_of_tile(focus[f]);
    const bool ki = share_line(c[2], c[0]);
    const bool kj = share_line(c[2], c[1]);
    const bool ji = share_line(c[1], c[0]);
    st.a_ki += ki;
    st.a_kj += kj;
    st.a_ji += ji;
    st.a_k += (ki || kj);

    const std::uint64_t u = stream.below(2 * static_cast<std::uint64_t>(n));
    std::array<Coord, 3> dx{};
    if (u >= static_cast<std::uint64_t>(n)) {
      const int row = static_cast<int>(u) - n;
      const auto masters = select_master_tiles(state, focus);
      const int master = masters[static_cast<std::size_t>(row)];
      int chosen = -1;
      for (std::size_t f = 0; f < 3; ++f) {
        if (focus[f] == master) chosen = static_cast<int>(f);
      }
      const int dir = chosen >= 0 ? inc[static_cast<std::size_t>(chosen)].at(st.moves[static_cast<std::size_t>(chosen)])
                                  : static_cast<int>(stream.below(4));
      const Move mv = move_for(state.coord_of_tile(master), dir);
      const Coord step = increment_of(dir);
      for (std::size_t f = 0; f < 3; ++f) {
        const bool moves = mv.is_row() ? c[f].y == mv.index : c[f].x == mv.index;
        if (!moves) continue;
        const Coord ydir = increment_of(inc[f].at(st.moves[f]));
        ++st.moves[f];
        dx[f] = step;
        xu[f].x += step.x;
        xu[f].y += step.y;
        yu[f].x += ydir.x;
        yu[f].y += ydir.y;
        if (static_cast<int>(f) != chosen) {
          ++st.interference[f];
          const bool on_line = f == 1 ? ji : (f == 2 ? (ki || kj) : false);
          if (!(ydir == step) && !on_line) ++st.y_disagreements_off_line;
        }
      }
      state.apply(mv);
    }
    if (xu[0].x != yu[0].x || xu[0].y != yu[0].y) st.x_matches_y_for_i = false;

    d.x += dx[0].x - dx[2].x;
    d.y += dx[0].y - dx[2].y;
    const long long now = s + 1;
    if (std::llabs(d.x) >= n || std::llabs(d.y) >= n) {
      if (!st.tau_esc) {
        st.tau_esc = now;
        st.m_stopped = static_cast<double>(std::llabs(d.x) + std::llabs(d.y)) - static_cast<double>(st.a_ki) / two_n;
        st.v1_stopped = static_cast<double>(d.x * d.x) - static_cast<double>(now) / two_n;
      }
      if (now < t) ++st.wrap_count;
      d.x = reduce_half(static_cast<int>(d.x), n);
      d.y = reduce_half(static_cast<int>(d.y), n);
    }
  }
  if (!st.tau_esc) {
    st.m_stopped = static_cast<double>(std::llabs(d.x) + std::llabs(d.y)) - static_cast<double>(st.a_ki) / two_n;
    st.v1_stopped = static_cast<double>(d.x * d.x) - static_cast<double>(t) / two_n;
  }

  for (std::size_t f = 0; f < 3; ++f) {
    st.x_end[f] = state.coord_of_tile(focus[f]);
    st.y_end[f] = {wrap(static_cast<int>(yu[f].x % n), n), wrap(static_cast<int>(yu[f].y % n), n)};
  }
  const long long zx = xu[2].x - yu[2].x;
  const long long zy = xu[2].y - yu[2].y;
  st.z_stopped = static_cast<double>(zx * zx + zy * zy) - 2.0 * static_cast<double>(st.interference[2]);

  if (const auto l = idealized_length(n, t)) {
    std::array<Coord, 3> w{};
    const long long len = static_cast<long long>(*l) * *l;
    for (std::size_t f = 0; f < 3; ++f) {
      long long wx = x0[f].x, wy = x0[f].y;
      for (long long q = 0; q < len; ++q) {
        const Coord m = increment_of(inc[f].at(q));
        wx += m.x;
        wy += m.y;
      }
      w[f] = {wrap(static_cast<int>(wx % n), n), wrap(static_cast<int>(wy % n), n)};
    }
    st.w_end = w;
  } else {
    st.w_omitted = true;
  }
  return st;
}

bool Box::contains(Coord c) const {
  const bool in_x = full_x || wrap(c.x - x_lo, n) <= x_hi - x_lo;
  const bool in_y = full_y || wrap(c.y - y_lo, n) <= y_hi - y_lo;
  return in_x && in_y;
}

Box make_box(int n, double cx, double cy, double side) {
  if (side < 1.0) throw std::domain_error("box side must be at least 1");
  Box b;
  b.n = n;
  b.x_lo = static_cast<int>(std::floor(cx - side / 2.0));
  b.x_hi = static_cast<int>(std::ceil(cx + side / 2.0));
  b.y_lo = static_cast<int>(std::floor(cy - side / 2.0));
  b.y_hi = static_cast<int>(std::ceil(cy + side / 2.0));
  b.full_x = b.x_hi - b.x_lo + 1 >= n;
  b.full_y = b.y_hi - b.y_lo + 1 >= n;
  return b;
}

std::array<Box, 3> stage1_boxes(int n, int l, double c) {
  const double side = c * l;
  if (side < 1.0) throw std::domain_error("box side c*l must be at least 1");
  const double L = l;
  return {make_box(n, L / 6.0, 5.0 * L / 6.0, side), make_box(n, L / 2.0, L / 2.0, side),
          make_box(n, 5.0 * L / 6.0, L / 6.0, side)};
}

std::array<int, 3> stage1_focus(int n, int l) {
  if (l < 2 || l > n) throw std::domain_error("need 2 <= l <= n");
  return {pos_index({0, l - 1}, n), pos_index({l / 2, l / 2}, n), pos_index({l - 1, 0}, n)};
}

InterferenceReport interference_bound_check(int n, int l, std::uint64_t trials, std::uint64_t seed,
                                            unsigned threads) {
  if (l < 2 || l > n) throw std::domain_error("need 2 <= l <= n");
  const long long t = 2LL * l * l * n;
  const auto focus = stage1_focus(n, l);
  struct Row {
    double a_k = 0, a_ki = 0, n_k = 0, wraps = 0;
    bool i_exact = true;
  };
  const auto rows = map_trials<Row>(trials, threads, [&](std::uint64_t trial) {
    ShuffleStream stream(seed, trial);
    const auto st = run_coupled(n, t, focus, stream);
    return Row{static_cast<double>(st.a_k) / (2.0 * n), static_cast<double>(st.a_ki) / (2.0 * n),
               static_cast<double>(st.interference[2]), static_cast<double>(st.wrap_count), st.x_matches_y_for_i};
  });
  RunningStats a, ai, nk, w;
  InterferenceReport rep;
  for (const auto& r : rows) {
    a.add(r.a_k);
    ai.add(r.a_ki);
    nk.add(r.n_k);
    w.add(r.wraps);
    rep.i_exact = rep.i_exact && r.i_exact;
  }
  rep.a_k_scaled = to_report(a);
  rep.a_ki_scaled = to_report(ai);
  rep.n_k = to_report(nk);
  rep.wraps = to_report(w);
  rep.bound = 128.0 * l;
  rep.a_ok = rep.a_k_scaled.upper3() <= rep.bound;
  rep.wraps_ok = rep.wraps.upper3() <= 32.0;
  return rep;
}

DriftReport martingale_drift_check(int n, long long t, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  const auto focus = stage1_focus(n, n);
  struct Row {
    double m = 0, v1 = 0, z = 0;
  };
  const auto rows = map_trials<Row>(trials, threads, [&](std::uint64_t trial) {
    ShuffleStream stream(seed, trial);
    const auto st = run_coupled(n, t, focus, stream);
    return Row{st.m_stopped - st.m_start, st.v1_stopped - st.v1_start, st.z_stopped};
  });
  RunningStats m, v, z;
  for (const auto& r : rows) {
    m.add(r.m);
    v.add(r.v1);
    z.add(r.z);
  }
  DriftReport rep;
  rep.steps = t;
  rep.m_increment = to_report(m);
  rep.v1_increment = to_report(v);
  rep.z_value = to_report(z);
  rep.m_ok = std::abs(rep.m_increment.mean) <= 3.0 * rep.m_increment.se;
  rep.v1_ok = rep.v1_increment.mean <= 3.0 * rep.v1_increment.se;
  rep.z_ok = rep.z_value.mean <= 3.0 * rep.z_value.se;
  return rep;
}

ProportionReport stage1_success(int n, int l, double c, std::uint64_t trials, std::uint64_t seed, unsigned threads,
                                std::uint64_t first_trial) {
  const auto boxes = stage1_boxes(n, l, c);
  const auto focus = stage1_focus(n, l);
  const long long t = 2LL * l * l * n;
  const auto hits = map_trials<char>(trials, threads, [&](std::uint64_t trial) {
    ShuffleStream stream(seed, first_trial + trial);
    const auto st = run_coupled(n, t, focus, stream);
    for (std::size_t f = 0; f < 3; ++f) {
      if (!boxes[f].contains(st.x_end[f])) return char{0};
    }
    return char{1};
  });
  ProportionReport rep;
  rep.trials = trials;
  for (char h : hits) rep.successes += static_cast<std::uint64_t>(h);
  rep.estimate = trials ? static_cast<double>(rep.successes) / static_cast<double>(trials) : 0.0;
  rep.ci = wilson_interval(rep.successes, trials);
  return rep;
}

}  // namespace toruslab
