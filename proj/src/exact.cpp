#include "toruslab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "toruslab/lehmer.hpp"
#include "toruslab/shuffle.hpp"

namespace toruslab {

namespace {

// Rotations grouped so that generator g ^ 1 undoes generator g.
std::vector<Move> rotation_generators(int n) {
  std::vector<Move> gens;
  for (Axis axis : {Axis::Row, Axis::Col}) {
    for (int i = 0; i < n; ++i) {
      gens.push_back(Move::rotate(axis, i, 1));
      gens.push_back(Move::rotate(axis, i, -1));
    }
  }
  return gens;
}

// dst[p]: where the content of position p goes under m.
std::vector<int> destinations(const Move& m, int n) {
  std::vector<int> dst(static_cast<std::size_t>(n * n));
  for (int p = 0; p < n * n; ++p) dst[static_cast<std::size_t>(p)] = pos_index(moved_coord(coord_of(p, n), m, n), n);
  return dst;
}

std::uint64_t pack(const GridPerm& p) {
  std::uint64_t key = 0;
  for (int t : p.tiles()) key = (key << 4) | static_cast<std::uint64_t>(t);
  return key;
}

// Moves of the lazy chain with integer weights over 8n: hold 4n, rotations 1.
std::vector<std::pair<Move, long long>> weighted_moves(int n) {
  std::vector<std::pair<Move, long long>> out;
  out.emplace_back(Move::hold(), 4LL * n);
  for (const Move& m : rotation_generators(n)) out.emplace_back(m, 1);
  return out;
}

bool mixed_pair(const Move& a, const Move& b) { return (a.is_row() && b.is_col()) || (a.is_col() && b.is_row()); }

}  // namespace

GridPerm ReachableClass::member_perm(std::size_t s) const {
  const auto v = member(s);
  return GridPerm::from_tile_at(n_, std::vector<int>(v.begin(), v.end()));
}

long long ReachableClass::index_of(std::span<const int> tile_at) const {
  if (static_cast<int>(tile_at.size()) != cells()) return -1;
  const auto r = lehmer_rank(tile_at);
  if (r >= index_by_rank_.size()) return -1;
  return index_by_rank_[r];
}

ReachableClass enumerate_reachable(int n) {
  if (n < 2) throw std::domain_error("grid side must be at least 2");
  if (n > 3) throw std::length_error("exact enumeration is limited to n <= 3");
  ReachableClass cls;
  cls.n_ = n;
  const int cells = n * n;
  const auto cz = static_cast<std::size_t>(cells);
  cls.generators_ = rotation_generators(n);
  std::vector<std::vector<int>> dst;
  for (const Move& m : cls.generators_) dst.push_back(destinations(m, n));
  cls.index_by_rank_.assign(factorial(cells), -1);

  std::vector<int> cur(cz), next(cz);
  for (int p = 0; p < cells; ++p) cur[static_cast<std::size_t>(p)] = p;
  cls.index_by_rank_[lehmer_rank(cur)] = 0;
  cls.states_.insert(cls.states_.end(), cur.begin(), cur.end());
  cls.count_ = 1;
  // states_ doubles as the BFS queue
  for (std::size_t head = 0; head < cls.count_; ++head) {
    for (std::size_t p = 0; p < cz; ++p) cur[p] = cls.states_[head * cz + p];
    for (const auto& d : dst) {
      for (std::size_t p = 0; p < cz; ++p) next[static_cast<std::size_t>(d[p])] = cur[p];
      auto& slot = cls.index_by_rank_[lehmer_rank(next)];
      if (slot >= 0) continue;
      slot = static_cast<std::int32_t>(cls.count_++);
      cls.states_.insert(cls.states_.end(), next.begin(), next.end());
    }
  }

  cls.succ_.assign(dst.size(), std::vector<std::uint32_t>(cls.count_));
  for (std::size_t s = 0; s < cls.count_; ++s) {
    for (std::size_t p = 0; p < cz; ++p) cur[p] = cls.states_[s * cz + p];
    for (std::size_t g = 0; g < dst.size(); ++g) {
      for (std::size_t p = 0; p < cz; ++p) next[static_cast<std::size_t>(dst[g][p])] = cur[p];
      cls.succ_[g][s] = static_cast<std::uint32_t>(cls.index_by_rank_[lehmer_rank(next)]);
    }
  }
  return cls;
}

void exact_step(const ReachableClass& cls, const std::vector<double>& law, std::vector<double>& next) {
  const double move = 1.0 / (8.0 * cls.n());
  const std::size_t gens = cls.generators().size();
  next.resize(law.size());
  for (std::size_t s = 0; s < law.size(); ++s) {
    // predecessors of s are the successors under the inverse generators
    double acc = 0.0;
    for (std::size_t g = 0; g < gens; ++g) acc += law[cls.successor(g ^ 1U, s)];
    next[s] = 0.5 * law[s] + move * acc;
  }
}

std::vector<double> exact_evolve(const ReachableClass& cls, long long t) {
  if (t < 0) throw std::domain_error("negative step count");
  std::vector<double> law(cls.size(), 0.0), next;
  law[0] = 1.0;
  for (long long s = 0; s < t; ++s) {
    exact_step(cls, law, next);
    law.swap(next);
  }
  return law;
}

RationalLaw exact_evolve_rational(const ReachableClass& cls, long long t) {
  if (t < 0) throw std::domain_error("negative step count");
  RationalLaw out;
  out.numerators.assign(cls.size(), BigInt(0));
  out.numerators[0] = 1;
  out.denominator = 1;
  const long long hold = 4LL * cls.n();
  std::vector<BigInt> next(cls.size());
  for (long long s = 0; s < t; ++s) {
    for (std::size_t i = 0; i < cls.size(); ++i) {
      BigInt acc = out.numerators[i] * hold;
      for (std::size_t g = 0; g < cls.generators().size(); ++g) acc += out.numerators[cls.successor(g ^ 1U, i)];
      next[i] = std::move(acc);
    }
    out.numerators.swap(next);
    out.denominator *= 8 * cls.n();
  }
  return out;
}

namespace {

double tv_to_uniform(const std::vector<double>& law) {
  const double u = 1.0 / static_cast<double>(law.size());
  double s = 0.0;
  for (double x : law) s += std::abs(x - u);
  return 0.5 * s;
}

double ent_to_uniform(const std::vector<double>& law) {
  const double logv = std::log(static_cast<double>(law.size()));
  double s = 0.0;
  for (double x : law) {
    if (x > 0.0) s += x * (std::log(x) + logv);
  }
  return s;
}

template <class F>
std::vector<double> curve(const ReachableClass& cls, long long t_max, F f) {
  std::vector<double> law(cls.size(), 0.0), next;
  law[0] = 1.0;
  std::vector<double> out;
  out.push_back(f(law));
  for (long long s = 0; s < t_max; ++s) {
    exact_step(cls, law, next);
    law.swap(next);
    out.push_back(f(law));
  }
  return out;
}

}  // namespace

std::vector<double> exact_tv_curve(const ReachableClass& cls, long long t_max) {
  return curve(cls, t_max, tv_to_uniform);
}

std::vector<double> exact_ent_curve(const ReachableClass& cls, long long t_max) {
  return curve(cls, t_max, ent_to_uniform);
}

long long exact_mixing_time(const ReachableClass& cls, long long t_max) {
  std::vector<double> law(cls.size(), 0.0), next;
  law[0] = 1.0;
  for (long long t = 0; t <= t_max; ++t) {
    if (tv_to_uniform(law) <= 0.25) return t;
    exact_step(cls, law, next);
    law.swap(next);
  }
  return -1;
}

BigRational two_step_equivalence(int n, long long gamma_num, long long gamma_den) {
  if (n < 2 || n > 3) throw std::length_error("two_step_equivalence is limited to n in {2, 3}");
  if (gamma_den <= 0 || gamma_num < 0 || gamma_num > gamma_den) throw std::domain_error("bad collision probability");
  const auto moves = weighted_moves(n);
  const CollisionTable table(n);
  // weights over gamma_den * (8n)^2
  std::map<std::uint64_t, BigInt> plain, monte;
  for (const auto& [a, wa] : moves) {
    for (const auto& [b, wb] : moves) {
      const long long w = wa * wb;
      GridPerm p(n);
      p.apply(a);
      p.apply(b);
      plain[pack(p)] += BigInt(w) * gamma_den;

      if (!mixed_pair(a, b)) {
        monte[pack(p)] += BigInt(w) * gamma_den;
        continue;
      }
      const Move& r = a.is_row() ? a : b;
      const Move& c = a.is_row() ? b : a;
      GridPerm q(n);
      q.apply(r);
      q.apply(c);
      monte[pack(q)] += BigInt(w) * (gamma_den - gamma_num);
      q.apply_cycle(table.triple(r, c));
      monte[pack(q)] += BigInt(w) * gamma_num;
    }
  }
  BigInt worst = 0;
  auto gap = [&](const std::map<std::uint64_t, BigInt>& x, const std::map<std::uint64_t, BigInt>& y) {
    for (const auto& [k, v] : x) {
      const auto it = y.find(k);
      BigInt d = v - (it == y.end() ? BigInt(0) : it->second);
      if (d < 0) d = -d;
      if (d > worst) worst = d;
    }
  };
  gap(plain, monte);
  gap(monte, plain);
  const BigInt denom = BigInt(gamma_den) * (8 * n) * (8 * n);
  return BigRational(worst, denom);
}

namespace {

BigRational collision_rate(int n, const std::array<int, 3>& cells, bool need_middle) {
  if (n < 2) throw std::domain_error("grid side must be at least 2");
  const CollisionTable table(n);
  auto sorted = cells;
  std::sort(sorted.begin(), sorted.end());
  const auto moves = weighted_moves(n);
  long long hits = 0;
  for (const auto& [a, wa] : moves) {
    for (const auto& [b, wb] : moves) {
      if (!mixed_pair(a, b)) continue;
      const Move& r = a.is_row() ? a : b;
      const Move& c = a.is_row() ? b : a;
      auto tri = table.triple(r, c);
      const int middle = tri[0];
      std::sort(tri.begin(), tri.end());
      if (tri != sorted) continue;
      if (need_middle && middle != cells[0]) continue;
      hits += wa * wb;
    }
  }
  return BigRational(BigInt(hits), BigInt(64LL * n * n));
}

}  // namespace

BigRational l_collision_rate(int n, const std::array<int, 3>& cells) { return collision_rate(n, cells, false); }

BigRational l_collision_rate_middle(int n, const std::array<int, 3>& cells) {
  return collision_rate(n, cells, true);
}

namespace {

void single_tile_step(int n, const std::vector<double>& law, std::vector<double>& next) {
  const double move = 1.0 / (8.0 * n);
  const double hold = 1.0 - 1.0 / (2.0 * n);
  next.assign(law.size(), 0.0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double v = law[static_cast<std::size_t>(y * n + x)];
      next[static_cast<std::size_t>(y * n + x)] =
          hold * v + move * (law[static_cast<std::size_t>(y * n + wrap(x + 1, n))] +
                             law[static_cast<std::size_t>(y * n + wrap(x - 1, n))] +
                             law[static_cast<std::size_t>(wrap(y + 1, n) * n + x)] +
                             law[static_cast<std::size_t>(wrap(y - 1, n) * n + x)]);
    }
  }
}

}  // namespace

Distribution single_tile_evolve(int n, long long t) {
  if (n < 2) throw std::domain_error("grid side must be at least 2");
  if (t < 0) throw std::domain_error("negative step count");
  std::vector<double> law(static_cast<std::size_t>(n * n), 0.0), next;
  law[0] = 1.0;
  for (long long s = 0; s < t; ++s) {
    single_tile_step(n, law, next);
    law.swap(next);
  }
  return Distribution::normalized(std::move(law));
}

long long single_tile_mixing(int n) {
  if (n < 2) throw std::domain_error("grid side must be at least 2");
  std::vector<double> law(static_cast<std::size_t>(n * n), 0.0), next;
  law[0] = 1.0;
  for (long long t = 0;; ++t) {
    if (tv_to_uniform(law) <= 0.25) return t;
    single_tile_step(n, law, next);
    law.swap(next);
  }
}

std::vector<double> lazy_walk_barrier_dp(int r, int K, int N, int x) {
  if (r < 1 || K < 1) throw std::domain_error("r and K must be positive");
  if (N < 0) throw std::domain_error("negative step count");
  const int w = K * r;
  std::vector<double> law(static_cast<std::size_t>(2 * w + 1), 0.0), next(law.size());
  if (std::abs(x) > w) return law;
  law[static_cast<std::size_t>(x + w)] = 1.0;
  for (int s = 0; s < N; ++s) {
    for (int i = 0; i <= 2 * w; ++i) {
      double v = 0.5 * law[static_cast<std::size_t>(i)];
      if (i > 0) v += 0.25 * law[static_cast<std::size_t>(i - 1)];
      if (i < 2 * w) v += 0.25 * law[static_cast<std::size_t>(i + 1)];
      next[static_cast<std::size_t>(i)] = v;
    }
    law.swap(next);
  }
  return law;
}

BarrierMinimum barrier_constant(int K, int r_lo, int r_hi) {
  if (r_lo < 1 || r_hi < r_lo) throw std::domain_error("bad r range");
  BarrierMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  for (int r = r_lo; r <= r_hi; ++r) {
    const int w = K * r;
    for (int x = -r; x <= r; ++x) {
      auto law = lazy_walk_barrier_dp(r, K, r * r, x);
      std::vector<double> next(law.size());
      for (int N = r * r; N <= 3 * r * r; ++N) {
        if (N > r * r) {
          for (int i = 0; i <= 2 * w; ++i) {
            double v = 0.5 * law[static_cast<std::size_t>(i)];
            if (i > 0) v += 0.25 * law[static_cast<std::size_t>(i - 1)];
            if (i < 2 * w) v += 0.25 * law[static_cast<std::size_t>(i + 1)];
            next[static_cast<std::size_t>(i)] = v;
          }
          law.swap(next);
        }
        for (int y = -r; y <= r; ++y) {
          const double v = r * law[static_cast<std::size_t>(y + w)];
          if (v < best.value) best = {v, r, x, y, N};
        }
      }
    }
  }
  return best;
}

bool buffer_constant_ok(int K) {
  const double lhs = std::exp(-(2.0 * K - 1.0) * (2.0 * K - 1.0) / 3.0);
  const double rhs = 1.0 / (2.0 * std::exp(1.0) * std::sqrt(3.0));
  return lhs <= rhs;
}

double displacement_dp(int n, long long s, int m) {
  if (n < 2 || m < 0 || s < 0) throw std::domain_error("bad displacement arguments");
  if (s == 0) return 0.0;
  const long long steps = 2 * s;
  if (steps > 2000000) throw std::length_error("displacement_dp step count too large");
  const double move = 1.0 / (8.0 * n);
  const double hold = 1.0 - 2.0 * move;
  const auto w = static_cast<std::size_t>(steps);
  std::vector<double> law(2 * w + 1, 0.0), next(law.size());
  law[w] = 1.0;
  for (long long t = 0; t < steps; ++t) {
    // support after t steps is [w - t, w + t]
    const std::size_t lo = w - static_cast<std::size_t>(t + 1);
    const std::size_t hi = w + static_cast<std::size_t>(t + 1);
    for (std::size_t i = lo; i <= hi; ++i) {
      double v = hold * law[i];
      if (i > 0) v += move * law[i - 1];
      if (i + 1 < law.size()) v += move * law[i + 1];
      next[i] = v;
    }
    law.swap(next);
  }
  double inside = 0.0;
  for (long long y = -m; y <= m; ++y) {
    const long long i = static_cast<long long>(w) + y;
    if (i >= 0 && i < static_cast<long long>(law.size())) inside += law[static_cast<std::size_t>(i)];
  }
  return 2.0 * std::max(0.0, 1.0 - inside);
}

}  // namespace toruslab
