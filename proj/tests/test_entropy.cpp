#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "toruslab/entropy.hpp"
#include "toruslab/lehmer.hpp"
#include "toruslab/rng.hpp"

using namespace toruslab;
using doctest::Approx;

namespace {

// Random law with a random number of exact zeros.
Distribution random_law(std::size_t size, ShuffleStream& s) {
  std::vector<double> w(size);
  const double zero_rate = s.uniform() * 0.5;
  double total = 0.0;
  for (auto& v : w) {
    v = s.uniform() < zero_rate ? 0.0 : -std::log(1.0 - s.uniform());
    total += v;
  }
  if (total == 0.0) w[0] = 1.0;
  return Distribution::normalized(w);
}

}  // namespace

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(Distribution({0.5, 0.6}), std::domain_error);
  CHECK_THROWS_AS(Distribution({-0.1, 1.1}), std::domain_error);
  CHECK_THROWS_AS(Distribution::normalized({0.0, 0.0}), std::domain_error);
  CHECK(Distribution::normalized({1.0, 3.0})[1] == Approx(0.75));
}

TEST_CASE("relative entropy examples") {
  const auto u = Distribution::uniform(5);
  CHECK(rel_entropy(u, u) == 0.0);
  CHECK(rel_entropy(Distribution::point_mass(5, 2), u) == Approx(std::log(5.0)));
  const Distribution a({0.75, 0.25});
  const Distribution b({0.5, 0.5});
  CHECK(rel_entropy(a, b) == Approx(0.75 * std::log(1.5) + 0.25 * std::log(0.5)));
  CHECK(std::isinf(rel_entropy(b, Distribution::point_mass(2, 0))));
  CHECK_THROWS_AS(rel_entropy(a, u), std::domain_error);
}

TEST_CASE("total variation examples") {
  const Distribution a({1.0, 0.0});
  CHECK(tv(a, a) == 0.0);
  CHECK(tv(a, Distribution({0.0, 1.0})) == 1.0);
  CHECK(tv(a, Distribution({0.5, 0.5})) == Approx(0.5));
}

TEST_CASE("pinsker gap examples") {
  const auto g0 = pinsker_gap(Distribution::uniform(7));
  CHECK(g0.tv == Approx(0.0));
  CHECK(g0.bound == Approx(0.0));
  CHECK(g0.holds());
  const auto g1 = pinsker_gap(Distribution::point_mass(2, 1));
  CHECK(g1.tv == Approx(0.5));
  CHECK(g1.bound == Approx(std::sqrt(0.5 * std::log(2.0))));
  CHECK(g1.bound == Approx(0.589).epsilon(1e-3));
  CHECK(g1.holds());
}

TEST_CASE("concavity defect examples") {
  const Distribution p({0.2, 0.3, 0.5});
  CHECK(d_distance(p, p) == Approx(0.0));
  CHECK(d_distance(Distribution::point_mass(3, 0), Distribution::point_mass(3, 2)) == Approx(std::log(2.0)));
}

TEST_CASE("pushforward examples") {
  const Distribution p({0.1, 0.2, 0.3, 0.4});
  const std::vector<int> id{0, 1, 2, 3};
  const auto q = pushforward(p, id, 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(q[i] == Approx(p[i]));
  const std::vector<int> constant{1, 1, 1, 1};
  const auto c = pushforward(p, constant, 3);
  CHECK(c[1] == Approx(1.0));
  CHECK(c[0] == 0.0);
  const std::vector<int> bad{0, 5, 0, 0};
  CHECK_THROWS_AS(pushforward(p, bad, 3), std::domain_error);
}

TEST_CASE("ratio of defect to entropy") {
  CHECK_FALSE(d_vs_entropy_ratio(Distribution::uniform(4)).has_value());
  const auto delta = Distribution::point_mass(16, 3);
  const auto r = d_vs_entropy_ratio(delta);
  REQUIRE(r.has_value());
  CHECK(*r == Approx(d_distance(delta, Distribution::uniform(16))));
  const auto near = d_vs_entropy_ratio(Distribution::normalized({1.0, 1.01, 0.99, 1.0}));
  REQUIRE(near.has_value());
  CHECK(std::isfinite(*near));
  CHECK(*near > 0.0);
}

TEST_CASE("entropy identities over random laws") {
  ShuffleStream s(404, 0);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t size = 2 + s.below(63);
    const auto p = random_law(size, s);
    const auto q = random_law(size, s);
    CHECK(ent(p) == Approx(std::log(double(size)) - shannon(p)).epsilon(1e-12));
    CHECK(pinsker_gap(p).holds());
    CHECK(d_distance(p, q) >= -1e-15);
    CHECK(d_distance(p, q) == Approx(d_distance(q, p)).epsilon(1e-12));
    std::vector<double> mid(size);
    for (std::size_t i = 0; i < size; ++i) mid[i] = 0.5 * (p[i] + q[i]);
    const double lhs = ent(Distribution::normalized(mid));
    const double rhs = 0.5 * ent(p) + 0.5 * ent(q) - d_distance(p, q);
    CHECK(std::abs(lhs - rhs) <= 1e-10);

    const std::size_t target = 1 + s.below(size);
    std::vector<int> g(size);
    for (auto& v : g) v = static_cast<int>(s.below(target));
    CHECK(d_distance(p, q) >= d_distance(pushforward(p, g, target), pushforward(q, g, target)) - 1e-12);
  }
}

TEST_CASE("decomposition of laws on S3") {
  SUBCASE("uniform") {
    const auto parts = entropy_decompose(PermLaw::uniform(3));
    CHECK(parts.sign_term == Approx(0.0));
    REQUIRE(parts.tilde_e.size() == 1);
    CHECK(parts.tilde_e[0] == Approx(0.0));
    CHECK(parts.residual == Approx(0.0));
  }
  SUBCASE("uniform on the even permutations") {
    std::vector<std::pair<std::vector<int>, double>> support;
    for (std::uint64_t r = 0; r < 6; ++r) {
      const auto p = lehmer_unrank(r, 3);
      if (perm_sign(p) == 1) support.push_back({p, 1.0 / 3.0});
    }
    const auto parts = entropy_decompose(PermLaw::from_support(3, support));
    CHECK(parts.sign_term == Approx(std::log(2.0)));
    CHECK(parts.tilde_e[0] == Approx(0.0));
    CHECK(parts.residual == Approx(0.0));
    CHECK(parts.total == Approx(std::log(2.0)));
  }
  SUBCASE("point mass at the identity") {
    const std::vector<int> id{0, 1, 2};
    const auto parts = entropy_decompose(PermLaw::point_mass(3, id));
    CHECK(parts.sign_term == Approx(std::log(2.0)));
    CHECK(parts.tilde_e[0] == Approx(std::log(3.0)));
    CHECK(parts.residual == Approx(0.0));
    CHECK(parts.total == Approx(std::log(6.0)));
  }
  CHECK_THROWS_AS(PermLaw::uniform(9), std::length_error);
}

TEST_CASE("decomposition reconstructs entropy and every part is nonnegative") {
  ShuffleStream s(77, 1);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 2 + static_cast<int>(s.below(5));
    const auto law = random_law(factorial(m), s);
    const PermLaw pl(m, std::vector<double>(law.weights().begin(), law.weights().end()));
    const auto parts = entropy_decompose(pl);
    CHECK(std::abs(parts.sum() - parts.total) <= 1e-10);
    CHECK(std::abs(parts.total - ent(law)) <= 1e-10);
    CHECK(parts.sign_term >= -1e-12);
    CHECK(parts.residual >= -1e-12);
    for (double e : parts.tilde_e) CHECK(e >= -1e-12);
  }
}
