#pragma once

// Finite distributions, relative entropy to uniform and friends.
// Natural logarithms throughout.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace toruslab {

class Distribution {
 public:
  /// Throws std::domain_error on negative/non-finite weights or a total
  /// further than 1e-12 from 1.
  explicit Distribution(std::vector<double> weights);

  /// Rescales nonnegative weights with a positive total.
  static Distribution normalized(std::vector<double> weights);
  static Distribution uniform(std::size_t size);
  static Distribution point_mass(std::size_t size, std::size_t at);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const { return w_; }

 private:
  std::vector<double> w_;
};

/// sum a_i log(a_i / b_i); +infinity when a is not absolutely continuous
/// with respect to b. Throws std::domain_error on a size mismatch.
double rel_entropy(const Distribution& a, const Distribution& b);

/// Relative entropy with respect to the uniform law on the index set.
double ent(const Distribution& p);

double shannon(const Distribution& p);

/// Half the l1 distance.
double tv(const Distribution& a, const Distribution& b);

struct PinskerGap {
  double tv = 0.0;
  double bound = 0.0;  // sqrt(ENT / 2)
  bool holds() const { return tv <= bound + 1e-15; }
};

PinskerGap pinsker_gap(const Distribution& a);

/// sum over i of p log p / 2 + q log q / 2 - m log m with m = (p + q) / 2.
double d_distance(const Distribution& p, const Distribution& q);

/// Law of g(X) for X ~ p; g maps into {0, ..., target_size - 1}.
Distribution pushforward(const Distribution& p, std::span<const int> g, std::size_t target_size);

/// d(q, U) log|V| / ENT(q); nullopt when ENT(q) = 0.
std::optional<double> d_vs_entropy_ratio(const Distribution& q);

/// Explicit law of a random permutation of {0, ..., m-1}, m <= 8. Entry r is
/// the probability of the permutation with Lehmer rank r, stored as
/// perm[card] = position of card.
class PermLaw {
 public:
  static constexpr int kMaxSize = 8;

  /// Throws std::length_error for m > kMaxSize.
  PermLaw(int m, std::vector<double> by_rank);

  static PermLaw uniform(int m);
  static PermLaw point_mass(int m, std::span<const int> perm);
  /// Probabilities keyed by explicit permutations; absent ones get 0.
  static PermLaw from_support(int m, const std::vector<std::pair<std::vector<int>, double>>& support);

  int m() const { return m_; }
  const Distribution& law() const { return law_; }

 private:
  int m_;
  Distribution law_;
};

struct EntropyParts {
  double sign_term = 0.0;
  std::vector<double> tilde_e;  // index 0 is position 3, ..., last is position m
  double residual = 0.0;
  double total = 0.0;           // ENT of the whole law

  double sum() const;
};

/// Splits ENT(law) along the chain sign, card at position m, card at m-1,
/// ..., card at position 3, rest. Positions are 1-based here; each term is
/// measured against the matching conditional of the uniform law.
EntropyParts entropy_decompose(const PermLaw& law);

}  // namespace toruslab
