#pragma once

// The torus shuffle driven by master tiles, run side by side with the
// oblivious process Y and the idealized endpoint W for three focus tiles.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "toruslab/grid.hpp"
#include "toruslab/rng.hpp"
#include "toruslab/stats.hpp"

namespace toruslab {

/// Unit increment in one of the four directions: 0 east, 1 west, 2 north,
/// 3 south.
Coord increment_of(int dir);

/// Master tile of every row: result[row] is a tile, and the tiles occupy
/// distinct columns. i is always chosen; j unless it shares a line with i;
/// k unless it shares a line with i or with j. Remaining rows, in
/// increasing order, take the lowest free column. Throws std::domain_error
/// for repeated focus tiles.
std::vector<int> select_master_tiles(const GridPerm& p, const std::array<int, 3>& focus);

struct TrajectoryStats {
  std::array<int, 3> focus{};
  long long steps = 0;
  std::array<Coord, 3> x_end{};
  std::array<Coord, 3> y_end{};
  std::optional<std::array<Coord, 3>> w_end;  // only when steps = 2 l^2 n
  bool w_omitted = false;

  std::array<long long, 3> moves{};         // times each focus tile moved
  std::array<long long, 3> interference{};  // N: moved while not a master tile
  long long a_ki = 0;                       // k shares a line with i
  long long a_kj = 0;
  long long a_ji = 0;
  long long a_k = 0;                        // k shares a line with i or j
  long long wrap_count = 1;                 // epochs of the (i, k) difference walk

  // Martingale diagnostics for the (i, k) pair and tile k.
  std::optional<long long> tau_esc;         // first wrap, if before the end
  double m_start = 0.0;                     // |D(0)|_1
  double m_stopped = 0.0;                   // |D|_1 - A^{k,i}/(2n) at t ^ tau
  double v1_start = 0.0;                    // D_1(0)^2
  double v1_stopped = 0.0;                  // D_1^2 - t/(2n) at t ^ tau
  double z_stopped = 0.0;                   // |X(k) - Y(k)|^2 - 2 N^k at the end

  bool x_matches_y_for_i = true;            // checked after every move
  long long y_disagreements_off_line = 0;   // Y and X differ for j or k without a shared line
};

/// Runs t steps of the master-tile construction from the identity. Needs
/// n >= 4 and distinct focus tiles. Focus tiles draw their increments from
/// their own substreams of `stream`.
TrajectoryStats run_coupled(int n, long long t, const std::array<int, 3>& focus, ShuffleStream& stream);

/// Same from an arbitrary start.
TrajectoryStats run_coupled(const GridPerm& start, long long t, const std::array<int, 3>& focus,
                            ShuffleStream& stream);

/// l such that t = 2 l^2 n, if any.
std::optional<int> idealized_length(int n, long long t);

struct Box {
  int x_lo = 0, x_hi = 0;  // inclusive, may wrap
  int y_lo = 0, y_hi = 0;
  bool full_x = false, full_y = false;
  int n = 0;
  bool contains(Coord c) const;
};

/// Side c*l box centred at (cx, cy), rounded outward. Throws
/// std::domain_error when c*l < 1.
Box make_box(int n, double cx, double cy, double side);

/// The three target boxes centred at (l/6, 5l/6), (l/2, l/2), (5l/6, l/6).
std::array<Box, 3> stage1_boxes(int n, int l, double c);

/// Default focus tiles for the three boxes: cells (0, l-1), (l/2, l/2),
/// (l-1, 0), all inside the l x l corner.
std::array<int, 3> stage1_focus(int n, int l);

struct MeanReport {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t trials = 0;
  double upper3() const { return mean + 3.0 * se; }
  double lower3() const { return mean - 3.0 * se; }
};

struct InterferenceReport {
  MeanReport a_k_scaled;   // A^k / (2n)
  MeanReport a_ki_scaled;  // A^{k,i} / (2n)
  MeanReport n_k;          // interference count of k
  MeanReport wraps;        // wrap-around epochs
  double bound = 0.0;      // 128 l
  bool a_ok = false;       // a_k_scaled + 3 se <= 128 l
  bool wraps_ok = false;   // wraps + 3 se <= 32
  bool i_exact = true;     // X and Y agree for tile i in every trial
};

InterferenceReport interference_bound_check(int n, int l, std::uint64_t trials, std::uint64_t seed,
                                            unsigned threads = 1);

struct DriftReport {
  MeanReport m_increment;   // M at t ^ tau minus M_0
  MeanReport v1_increment;  // V_1 at t ^ tau minus V_1(0)
  MeanReport z_value;       // |Z|^2 - 2 N^k at t
  long long steps = 0;
  bool m_ok = false;        // |mean| <= 3 se
  bool v1_ok = false;       // mean <= 3 se
  bool z_ok = false;        // mean <= 3 se
};

DriftReport martingale_drift_check(int n, long long t, std::uint64_t trials, std::uint64_t seed,
                                   unsigned threads = 1);

struct ProportionReport {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  Interval ci;
};

/// Fraction of trials in which the default focus tiles all land in their
/// boxes after 2 l^2 n steps.
ProportionReport stage1_success(int n, int l, double c, std::uint64_t trials, std::uint64_t seed,
                                unsigned threads = 1, std::uint64_t first_trial = 0);

}  // namespace toruslab
