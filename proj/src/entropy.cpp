#include "toruslab/entropy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "toruslab/lehmer.hpp"

namespace toruslab {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void require_same_size(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) throw std::domain_error("distributions over different index sets");
}

}  // namespace

Distribution::Distribution(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw std::domain_error("empty distribution");
  double total = 0.0;
  for (double x : w_) {
    if (!std::isfinite(x) || x < 0.0) throw std::domain_error("weights must be finite and nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::domain_error("weights do not sum to 1");
}

Distribution Distribution::normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double x : weights) {
    if (!std::isfinite(x) || x < 0.0) throw std::domain_error("weights must be finite and nonnegative");
    total += x;
  }
  if (!(total > 0.0)) throw std::domain_error("weights have zero total");
  for (double& x : weights) x /= total;
  // absorb the last rounding error so the constructor's check is exact enough
  double s = 0.0;
  for (double x : weights) s += x;
  if (std::abs(s - 1.0) > 1e-12) {
    for (double& x : weights) x /= s;
  }
  return Distribution(std::move(weights));
}

Distribution Distribution::uniform(std::size_t size) {
  if (size == 0) throw std::domain_error("empty distribution");
  return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Distribution Distribution::point_mass(std::size_t size, std::size_t at) {
  if (at >= size) throw std::domain_error("point mass outside the index set");
  std::vector<double> w(size, 0.0);
  w[at] = 1.0;
  return Distribution(std::move(w));
}

double rel_entropy(const Distribution& a, const Distribution& b) {
  require_same_size(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    if (b[i] == 0.0) return std::numeric_limits<double>::infinity();
    s += a[i] * std::log(a[i] / b[i]);
  }
  return s;
}

double ent(const Distribution& p) {
  const double logv = std::log(static_cast<double>(p.size()));
  double s = 0.0;
  for (double x : p.weights()) {
    if (x > 0.0) s += x * (std::log(x) + logv);
  }
  return s;
}

double shannon(const Distribution& p) {
  double h = 0.0;
  for (double x : p.weights()) h -= xlogx(x);
  return h;
}

double tv(const Distribution& a, const Distribution& b) {
  require_same_size(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

PinskerGap pinsker_gap(const Distribution& a) {
  PinskerGap g;
  g.tv = tv(a, Distribution::uniform(a.size()));
  g.bound = std::sqrt(0.5 * std::max(0.0, ent(a)));
  return g;
}

double d_distance(const Distribution& p, const Distribution& q) {
  require_same_size(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    s += 0.5 * xlogx(p[i]) + 0.5 * xlogx(q[i]) - xlogx(m);
  }
  return std::max(0.0, s);
}

Distribution pushforward(const Distribution& p, std::span<const int> g, std::size_t target_size) {
  if (g.size() != p.size()) throw std::domain_error("map must be defined on the whole index set");
  std::vector<double> w(target_size, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (g[i] < 0 || static_cast<std::size_t>(g[i]) >= target_size) {
      throw std::domain_error("map value outside the target set");
    }
    w[static_cast<std::size_t>(g[i])] += p[i];
  }
  return Distribution::normalized(std::move(w));
}

std::optional<double> d_vs_entropy_ratio(const Distribution& q) {
  const double e = ent(q);
  if (!(e > 0.0)) return std::nullopt;
  const double d = d_distance(q, Distribution::uniform(q.size()));
  return d * std::log(static_cast<double>(q.size())) / e;
}

PermLaw::PermLaw(int m, std::vector<double> by_rank)
    : m_(m), law_(m >= 1 && m <= kMaxSize ? Distribution(std::move(by_rank)) : Distribution::uniform(1)) {
  if (m < 1 || m > kMaxSize) throw std::length_error("PermLaw supports decks of size 1..8");
  if (law_.size() != factorial(m)) throw std::domain_error("PermLaw needs one probability per permutation");
}

PermLaw PermLaw::uniform(int m) {
  if (m < 1 || m > kMaxSize) throw std::length_error("PermLaw supports decks of size 1..8");
  const auto f = factorial(m);
  return PermLaw(m, std::vector<double>(f, 1.0 / static_cast<double>(f)));
}

PermLaw PermLaw::point_mass(int m, std::span<const int> perm) {
  if (m < 1 || m > kMaxSize) throw std::length_error("PermLaw supports decks of size 1..8");
  std::vector<double> w(factorial(m), 0.0);
  w[lehmer_rank(perm)] = 1.0;
  return PermLaw(m, std::move(w));
}

PermLaw PermLaw::from_support(int m, const std::vector<std::pair<std::vector<int>, double>>& support) {
  if (m < 1 || m > kMaxSize) throw std::length_error("PermLaw supports decks of size 1..8");
  std::vector<double> w(factorial(m), 0.0);
  for (const auto& [perm, pr] : support) {
    if (static_cast<int>(perm.size()) != m) throw std::domain_error("support permutation has wrong size");
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (int v : perm) {
      if (v < 0 || v >= m || seen[static_cast<std::size_t>(v)]) throw std::domain_error("not a permutation");
      seen[static_cast<std::size_t>(v)] = 1;
    }
    w[lehmer_rank(perm)] += pr;
  }
  return PermLaw(m, std::move(w));
}

double EntropyParts::sum() const {
  double s = sign_term + residual;
  for (double e : tilde_e) s += e;
  return s;
}

namespace {

// E_P[ KL( P(value | key) || U(value | key) ) ] with U uniform over ranks.
template <class KeyFn, class ValueFn>
double conditional_term(const Distribution& p, KeyFn key, ValueFn value, std::uint64_t value_range) {
  std::unordered_map<std::uint64_t, double> pk, uk, pj, uj;
  const double u = 1.0 / static_cast<double>(p.size());
  for (std::size_t r = 0; r < p.size(); ++r) {
    const std::uint64_t k = key(r);
    const std::uint64_t j = k * value_range + value(r);
    uk[k] += u;
    uj[j] += u;
    if (p[r] > 0.0) {
      pk[k] += p[r];
      pj[j] += p[r];
    }
  }
  double s = 0.0;
  for (const auto& [j, pr] : pj) {
    const std::uint64_t k = j / value_range;
    s += pr * std::log((pr / pk[k]) / (uj[j] / uk[k]));
  }
  return std::max(0.0, s);
}

}  // namespace

EntropyParts entropy_decompose(const PermLaw& law) {
  const int m = law.m();
  if (m > PermLaw::kMaxSize) throw std::length_error("entropy_decompose supports m <= 8");
  const auto count = static_cast<std::size_t>(factorial(m));
  // card at each position, and sign, for every rank
  std::vector<std::vector<int>> card_at(count);
  std::vector<int> sgn(count);
  for (std::size_t r = 0; r < count; ++r) {
    const auto pos_of = lehmer_unrank(r, m);
    card_at[r] = invert_perm(pos_of);
    sgn[r] = perm_sign(pos_of) > 0 ? 0 : 1;
  }
  const auto mm = static_cast<std::uint64_t>(m);
  // positions first..m-1 (0-based) and the sign
  auto tail_key = [&](std::size_t r, int first) {
    std::uint64_t k = static_cast<std::uint64_t>(sgn[r]);
    for (int p = first; p < m; ++p) k = k * mm + static_cast<std::uint64_t>(card_at[r][static_cast<std::size_t>(p)]);
    return k;
  };

  const Distribution& p = law.law();
  EntropyParts out;
  out.total = ent(p);
  out.sign_term = conditional_term(p, [](std::size_t) { return std::uint64_t{0}; },
                                   [&](std::size_t r) { return static_cast<std::uint64_t>(sgn[r]); }, 2);
  // 1-based position k is 0-based k - 1; condition on 1-based k+1..m
  for (int k = 3; k <= m; ++k) {
    out.tilde_e.push_back(conditional_term(
        p, [&](std::size_t r) { return tail_key(r, k); },
        [&](std::size_t r) { return static_cast<std::uint64_t>(card_at[r][static_cast<std::size_t>(k - 1)]); },
        mm));
  }
  out.residual = conditional_term(p, [&](std::size_t r) { return tail_key(r, std::min(2, m)); },
                                  [](std::size_t r) { return static_cast<std::uint64_t>(r); }, count);
  return out;
}

}  // namespace toruslab
