#pragma once

// Monte Carlo estimators with Wilson intervals. Trial i always uses the
// stream keyed by (seed, i) and results are reduced in trial order, so the
// worker count never changes a reported number.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "toruslab/stats.hpp"

namespace toruslab {

struct ExperimentConfig {
  int n = 6;
  int l = 2;
  long long steps = 0;    // t; 0 = derive from T
  long long T = 0;        // window-start bound; 0 = derive
  long long T_prime = 0;  // plain-chain steps for triple probabilities; 0 = derive
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  double c = 1.0 / 3.0;
  int K = 2;
  double C = 4.0;

  /// Fills derived fields:
  ///   T_prime = smallest even integer >= C l^2 n
  ///   T       = ceil(9 C n l^2 / 2), or max(1, steps - floor(n l^2 / 6))
  ///             when steps is given
  ///   steps   = T + floor(n l^2 / 6)
  /// then validates. Throws std::domain_error on an invalid configuration.
  ExperimentConfig resolved() const;
  void validate() const;
};

struct BatchRow {
  std::uint64_t batch = 0;
  std::uint64_t first_trial = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
};

struct EstimateReport {
  double estimate = 0.0;
  double se = 0.0;
  Interval ci;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::vector<BatchRow> batches;
};

/// Builds a report from per-trial 0/1 outcomes in trial order.
EstimateReport summarize_bernoulli(const std::vector<char>& hits, std::uint64_t seed, std::uint64_t batch_size);

/// Probability that the tiles labelled (i, j, k) sit at the cells labelled
/// (i', j', k') after T' steps of the lazy chain. Labels must lie in 1..l^2
/// and be distinct within each triple.
EstimateReport estimate_triple_prob(const ExperimentConfig& cfg, const std::array<int, 3>& tiles,
                                    const std::array<int, 3>& targets, unsigned threads = 1,
                                    std::uint64_t batch_size = 1000);

struct MatchTable {
  int x = 0;
  std::vector<int> z_labels;
  std::vector<std::uint64_t> counts;  // M2(x) = z and M1(x) < x
  std::vector<Interval> cis;
  std::uint64_t matched = 0;          // M1(x) != x
  std::uint64_t matched_below = 0;    // M1(x) < x
  std::uint64_t trials = 0;
  long long T = 0;
  long long t = 0;
  double a_hat = 0.0;                 // x * min_z P
  double a_hat_lower = 0.0;           // x * min_z (Wilson lower bound)
  std::vector<BatchRow> batches;      // successes = matched_below
  double wall_seconds = 0.0;
};

/// Window start uniform on {1, ..., cfg.T}, window end cfg.steps, two-step
/// chain from the identity. `z_labels` empty means every label below x.
MatchTable estimate_match_probs(const ExperimentConfig& cfg, int x, std::vector<int> z_labels,
                                unsigned threads = 1, std::uint64_t batch_size = 1000);

struct NicelyReport {
  EstimateReport nicely;   // matched with x in the middle of the L
  EstimateReport matched;  // matched in any role
};

/// Same windows as estimate_match_probs for the labelled triple (x, y, z).
NicelyReport estimate_match_nicely(const ExperimentConfig& cfg, const std::array<int, 3>& labels,
                                   unsigned threads = 1, std::uint64_t batch_size = 1000);

enum class MixingStatistic { SingleTile, FullDeck };

struct ExponentFit {
  std::vector<int> ns;
  std::vector<double> values;
  LineFit fit;
};

/// Least-squares slope of log t* against log n. Full-deck values exist for
/// n <= 3 only. Throws std::domain_error for fewer than three sizes.
ExponentFit fit_mixing_exponent(const std::vector<int>& ns, MixingStatistic statistic);

/// Shell bounds: l_k = min(2^(k-1), n); I_k = {l_{k-1}^2 + 1, ..., l_k^2}.
int shell_side(int k, int n);
int shell_of_label(int label, int n);

}  // namespace toruslab
