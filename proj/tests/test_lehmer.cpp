#include "doctest.h"

#include <set>
#include <vector>

#include "toruslab/lehmer.hpp"

using namespace toruslab;

TEST_CASE("lehmer ranks enumerate every permutation once") {
  for (int m = 1; m <= 7; ++m) {
    std::set<std::vector<int>> seen;
    for (std::uint64_t r = 0; r < factorial(m); ++r) {
      const auto p = lehmer_unrank(r, m);
      REQUIRE(lehmer_rank(p) == r);
      seen.insert(p);
      const auto inv = invert_perm(p);
      for (int i = 0; i < m; ++i) REQUIRE(inv[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] == i);
      REQUIRE(perm_sign(inv) == perm_sign(p));
    }
    CHECK(seen.size() == factorial(m));
  }
  CHECK(lehmer_rank(std::vector<int>{0, 1, 2}) == 0);
  CHECK(lehmer_rank(std::vector<int>{2, 1, 0}) == 5);
  CHECK(perm_sign(std::vector<int>{1, 0, 2}) == -1);
  CHECK(perm_sign(std::vector<int>{1, 2, 0}) == 1);
  CHECK(factorial(9) == 362880);
}
