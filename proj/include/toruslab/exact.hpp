#pragma once

// Enumeration-based ground truth for small instances.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "toruslab/entropy.hpp"
#include "toruslab/grid.hpp"

namespace toruslab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// All arrangements reachable from the identity under the row and column
/// rotations, for n in {2, 3}. Member 0 is the identity.
class ReachableClass {
 public:
  int n() const { return n_; }
  std::size_t size() const { return count_; }
  int cells() const { return n_ * n_; }

  /// Position -> tile view of member s.
  std::span<const std::uint8_t> member(std::size_t s) const {
    return {states_.data() + s * static_cast<std::size_t>(cells()), static_cast<std::size_t>(cells())};
  }
  GridPerm member_perm(std::size_t s) const;

  /// Index of a position -> tile arrangement, or -1 if unreachable.
  long long index_of(std::span<const int> tile_at) const;

  /// Rotations in the order used by successor().
  const std::vector<Move>& generators() const { return generators_; }
  std::uint32_t successor(std::size_t g, std::size_t s) const { return succ_[g][s]; }

  friend ReachableClass enumerate_reachable(int n);

 private:
  int n_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> states_;
  std::vector<std::int32_t> index_by_rank_;
  std::vector<Move> generators_;
  std::vector<std::vector<std::uint32_t>> succ_;
};

/// Breadth-first search from the identity. Throws std::length_error for
/// n > 3 and std::domain_error for n < 2.
ReachableClass enumerate_reachable(int n);

/// Law of the lazy chain after t steps from the identity.
std::vector<double> exact_evolve(const ReachableClass& cls, long long t);

/// One lazy step applied to `law` (double buffered).
void exact_step(const ReachableClass& cls, const std::vector<double>& law, std::vector<double>& next);

struct RationalLaw {
  std::vector<BigInt> numerators;
  BigInt denominator;  // (8n)^t
};

RationalLaw exact_evolve_rational(const ReachableClass& cls, long long t);

/// tv distance to uniform on the class at t = 0, 1, ..., t_max.
std::vector<double> exact_tv_curve(const ReachableClass& cls, long long t_max);

/// ENT of the law (relative to uniform on the class) at t = 0, ..., t_max.
std::vector<double> exact_ent_curve(const ReachableClass& cls, long long t_max);

/// First t with tv to uniform at most 1/4; -1 if not reached by t_max.
long long exact_mixing_time(const ReachableClass& cls, long long t_max = 100000);

/// Largest gap between the law of two plain lazy steps and the law of one
/// two-step 3-Monte step whose collision fires with probability
/// gamma_num / gamma_den. Exact; zero for the fair coin.
BigRational two_step_equivalence(int n, long long gamma_num = 1, long long gamma_den = 2);

/// Probability that one step of the two-step chain is a collision on exactly
/// the cells {a, b, c} (any cycle order), by enumerating all move pairs.
BigRational l_collision_rate(int n, const std::array<int, 3>& cells);

/// Same, but also requiring cells[0] to be the middle of the triple.
BigRational l_collision_rate_middle(int n, const std::array<int, 3>& cells);

/// Position law of a single tile started at cell 0: each step it holds with
/// probability 1 - 1/(2n) and moves to each neighbour with 1/(8n).
Distribution single_tile_evolve(int n, long long t);

/// First t with tv to uniform at most 1/4.
long long single_tile_mixing(int n);

/// P(Y_N = y, |Y_s| <= K r for all s <= N) for the lazy walk from x, for
/// y = -K r, ..., K r. Index y + K r.
std::vector<double> lazy_walk_barrier_dp(int r, int K, int N, int x);

struct BarrierMinimum {
  double value = 0.0;  // min of r P(Y_N = y, barrier respected)
  int r = 0, x = 0, y = 0, N = 0;
};

/// Minimum over r in [r_lo, r_hi], |x|, |y| <= r and r^2 <= N <= 3 r^2.
BarrierMinimum barrier_constant(int K, int r_lo, int r_hi);

/// e^{-(2K-1)^2/3} <= 1/(2 e sqrt 3).
bool buffer_constant_ok(int K);

/// Union bound 2 P(|W| > m) for one coordinate of a tile after s steps of
/// the two-step chain (2s lazy steps, each +-1 with probability 1/(8n)).
double displacement_dp(int n, long long s, int m);

}  // namespace toruslab
