#include "toruslab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "toruslab/exact.hpp"
#include "toruslab/grid.hpp"
#include "toruslab/parallel.hpp"
#include "toruslab/rng.hpp"
#include "toruslab/shuffle.hpp"

namespace toruslab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<BatchRow> batch_rows(const std::vector<char>& hits, std::uint64_t batch_size) {
  std::vector<BatchRow> rows;
  if (batch_size == 0) batch_size = 1;
  for (std::uint64_t lo = 0; lo < hits.size(); lo += batch_size) {
    BatchRow r;
    r.batch = lo / batch_size;
    r.first_trial = lo;
    r.trials = std::min<std::uint64_t>(batch_size, hits.size() - lo);
    for (std::uint64_t i = lo; i < lo + r.trials; ++i) r.successes += static_cast<std::uint64_t>(hits[i]);
    rows.push_back(r);
  }
  return rows;
}

void check_label(int label, int l, int n) {
  if (label < 1 || label > l * l || label > n * n) throw std::domain_error("label outside the l x l box");
}

}  // namespace

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig r = *this;
  if (r.n < 2) throw std::domain_error("n must be at least 2");
  if (r.l < 1 || r.l > r.n) throw std::domain_error("l must be in 1..n");
  if (!(r.C > 0.0)) throw std::domain_error("C must be positive");
  const double l2n = static_cast<double>(r.l) * r.l * r.n;
  if (r.T_prime == 0) {
    auto tp = static_cast<long long>(std::ceil(r.C * l2n - 1e-9));
    if (tp % 2 != 0) ++tp;
    r.T_prime = tp;
  }
  const long long tail = static_cast<long long>(r.n) * r.l * r.l / 6;
  if (r.T == 0) {
    r.T = r.steps > 0 ? std::max<long long>(1, r.steps - tail)
                      : static_cast<long long>(std::ceil(9.0 * r.C * l2n / 2.0 - 1e-9));
  }
  if (r.steps == 0) r.steps = r.T + tail;
  r.validate();
  return r;
}

void ExperimentConfig::validate() const {
  if (n < 2) throw std::domain_error("n must be at least 2");
  if (l < 1 || l > n) throw std::domain_error("l must be in 1..n");
  if (trials < 1) throw std::domain_error("trials must be at least 1");
  if (T < 1 || T > steps) throw std::domain_error("need 1 <= T <= t");
  if (T_prime < 0) throw std::domain_error("T' must be nonnegative");
  if (!(c > 0.0) || !(C > 0.0) || K < 1) throw std::domain_error("constants c, C, K must be positive");
}

EstimateReport summarize_bernoulli(const std::vector<char>& hits, std::uint64_t seed, std::uint64_t batch_size) {
  EstimateReport rep;
  rep.seed = seed;
  rep.trials = hits.size();
  for (char h : hits) rep.successes += static_cast<std::uint64_t>(h);
  if (rep.trials > 0) {
    const double p = static_cast<double>(rep.successes) / static_cast<double>(rep.trials);
    rep.estimate = p;
    rep.se = std::sqrt(p * (1.0 - p) / static_cast<double>(rep.trials));
  }
  rep.ci = wilson_interval(rep.successes, rep.trials);
  rep.batches = batch_rows(hits, batch_size);
  return rep;
}

EstimateReport estimate_triple_prob(const ExperimentConfig& cfg_in, const std::array<int, 3>& tiles,
                                    const std::array<int, 3>& targets, unsigned threads, std::uint64_t batch_size) {
  const auto start = Clock::now();
  const ExperimentConfig cfg = cfg_in.resolved();
  if (cfg.T_prime % 2 != 0) throw std::domain_error("T' must be even");
  for (int a : tiles) check_label(a, cfg.l, cfg.n);
  for (int a : targets) check_label(a, cfg.l, cfg.n);
  if (tiles[0] == tiles[1] || tiles[0] == tiles[2] || tiles[1] == tiles[2] || targets[0] == targets[1] ||
      targets[0] == targets[2] || targets[1] == targets[2]) {
    throw std::domain_error("labels within a triple must be distinct");
  }
  const Labeling lab(cfg.n);
  const std::array<int, 3> from{lab.tile_of_label(tiles[0]), lab.tile_of_label(tiles[1]), lab.tile_of_label(tiles[2])};
  const std::array<int, 3> to{lab.tile_of_label(targets[0]), lab.tile_of_label(targets[1]),
                              lab.tile_of_label(targets[2])};
  const int n = cfg.n;
  const long long steps = cfg.T_prime;
  const auto hits = map_trials<char>(cfg.trials, threads, [&](std::uint64_t trial) {
    ShuffleStream stream(cfg.seed, trial);
    TileTracker<3> tr(n, from);
    for (long long s = 0; s < steps; ++s) tr.apply(sample_move(n, stream));
    return static_cast<char>(tr.pos(0) == to[0] && tr.pos(1) == to[1] && tr.pos(2) == to[2]);
  });
  auto rep = summarize_bernoulli(hits, cfg.seed, batch_size);
  rep.wall_seconds = seconds_since(start);
  return rep;
}

MatchTable estimate_match_probs(const ExperimentConfig& cfg_in, int x, std::vector<int> z_labels, unsigned threads,
                                std::uint64_t batch_size) {
  const auto start = Clock::now();
  const ExperimentConfig cfg = cfg_in.resolved();
  const int n = cfg.n;
  if (x < 1 || x > n * n) throw std::domain_error("label x out of range");
  if (z_labels.empty()) {
    for (int z = 1; z < x; ++z) z_labels.push_back(z);
  }
  for (int z : z_labels) {
    if (z < 1 || z > n * n || z == x) throw std::domain_error("bad candidate label");
  }
  if (cfg.steps < 1 || cfg.T > cfg.steps) throw std::domain_error("empty matching window");
  const Labeling lab(n);
  const CollisionTable table(n);
  const int x_tile = lab.tile_of_label(x);

  struct Row {
    bool matched = false;
    int m1_label = 0;
    int m2_label = 0;
  };
  const auto rows = map_trials<Row>(cfg.trials, threads, [&](std::uint64_t trial) {
    ShuffleStream stream(cfg.seed, trial);
    const auto T = static_cast<int>(1 + stream.below(static_cast<std::uint64_t>(cfg.T)));
    RandomMoves source(stream);
    const auto cm = card_match(n, x_tile, T, static_cast<int>(cfg.steps), source, table);
    Row r;
    r.matched = cm.m1 != x_tile;
    if (r.matched) {
      r.m1_label = lab.label_of_tile(cm.m1);
      r.m2_label = lab.label_of_tile(cm.m2);
    }
    return r;
  });

  MatchTable out;
  out.x = x;
  out.z_labels = z_labels;
  out.counts.assign(z_labels.size(), 0);
  out.trials = cfg.trials;
  out.T = cfg.T;
  out.t = cfg.steps;
  std::vector<char> below(rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    if (!r.matched) continue;
    ++out.matched;
    if (r.m1_label >= x) continue;
    ++out.matched_below;
    below[i] = 1;
    for (std::size_t zi = 0; zi < z_labels.size(); ++zi) {
      if (z_labels[zi] == r.m2_label) ++out.counts[zi];
    }
  }
  double min_p = std::numeric_limits<double>::infinity();
  double min_lo = std::numeric_limits<double>::infinity();
  for (std::size_t zi = 0; zi < z_labels.size(); ++zi) {
    out.cis.push_back(wilson_interval(out.counts[zi], out.trials));
    min_p = std::min(min_p, static_cast<double>(out.counts[zi]) / static_cast<double>(out.trials));
    min_lo = std::min(min_lo, out.cis.back().lo);
  }
  if (!z_labels.empty()) {
    out.a_hat = x * min_p;
    out.a_hat_lower = x * min_lo;
  }
  out.batches = batch_rows(below, batch_size);
  out.wall_seconds = seconds_since(start);
  return out;
}

NicelyReport estimate_match_nicely(const ExperimentConfig& cfg_in, const std::array<int, 3>& labels, unsigned threads,
                                   std::uint64_t batch_size) {
  const auto start = Clock::now();
  const ExperimentConfig cfg = cfg_in.resolved();
  const int n = cfg.n;
  for (int a : labels) {
    if (a < 1 || a > n * n) throw std::domain_error("label out of range");
  }
  const Labeling lab(n);
  const CollisionTable table(n);
  const std::array<int, 3> focus{lab.tile_of_label(labels[0]), lab.tile_of_label(labels[1]),
                                 lab.tile_of_label(labels[2])};
  const auto rows = map_trials<char>(cfg.trials, threads, [&](std::uint64_t trial) {
    ShuffleStream stream(cfg.seed, trial);
    const auto T = static_cast<int>(1 + stream.below(static_cast<std::uint64_t>(cfg.T)));
    RandomMoves source(stream);
    const auto m = trace_matching(n, focus, T, static_cast<int>(cfg.steps), source, table);
    // bit 0: matched, bit 1: matched nicely
    return static_cast<char>((m.matched() ? 1 : 0) | (m.matched() && m.x_middle ? 2 : 0));
  });
  std::vector<char> nicely(rows.size()), matched(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    matched[i] = static_cast<char>(rows[i] & 1);
    nicely[i] = static_cast<char>((rows[i] >> 1) & 1);
  }
  NicelyReport rep{summarize_bernoulli(nicely, cfg.seed, batch_size), summarize_bernoulli(matched, cfg.seed, batch_size)};
  rep.nicely.wall_seconds = rep.matched.wall_seconds = seconds_since(start);
  return rep;
}

ExponentFit fit_mixing_exponent(const std::vector<int>& ns, MixingStatistic statistic) {
  if (ns.size() < 3) throw std::domain_error("need at least three sizes");
  ExponentFit out;
  out.ns = ns;
  std::vector<double> xs;
  for (int n : ns) {
    long long t = 0;
    if (statistic == MixingStatistic::SingleTile) {
      t = single_tile_mixing(n);
    } else {
      if (n > 3) throw std::domain_error("full-deck mixing times exist only for n <= 3");
      t = exact_mixing_time(enumerate_reachable(n));
    }
    xs.push_back(n);
    out.values.push_back(static_cast<double>(t));
  }
  out.fit = fit_loglog(xs, out.values);
  return out;
}

int shell_side(int k, int n) {
  if (k <= 0) return 0;
  if (k - 1 >= 30) return n;
  return std::min(1 << (k - 1), n);
}

int shell_of_label(int label, int n) {
  if (label < 1 || label > n * n) throw std::domain_error("label out of range");
  for (int k = 1;; ++k) {
    const int s = shell_side(k, n);
    if (label <= s * s) return k;
  }
}

}  // namespace toruslab
