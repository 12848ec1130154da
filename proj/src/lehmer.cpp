#include "toruslab/lehmer.hpp"

#include <stdexcept>

namespace toruslab {

std::uint64_t factorial(int m) {
  if (m < 0 || m > 20) throw std::domain_error("factorial argument out of range");
  std::uint64_t f = 1;
  for (int i = 2; i <= m; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::uint64_t lehmer_rank(std::span<const int> perm) {
  const auto m = perm.size();
  std::uint64_t rank = 0;
  std::uint32_t used = 0;  // m <= 20 in practice; ranks beyond 20! overflow anyway
  for (std::size_t i = 0; i < m; ++i) {
    const int v = perm[i];
    // digits smaller than v not used yet
    const std::uint32_t below = (1u << v) - 1u;
    const auto smaller = static_cast<std::uint64_t>(__builtin_popcount(below & ~used));
    rank = rank * (m - i) + smaller;
    used |= 1u << v;
  }
  return rank;
}

std::vector<int> lehmer_unrank(std::uint64_t rank, int m) {
  std::vector<int> digits(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    const auto base = static_cast<std::uint64_t>(m - i);
    digits[static_cast<std::size_t>(i)] = static_cast<int>(rank % base);
    rank /= base;
  }
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::uint32_t used = 0;
  for (int i = 0; i < m; ++i) {
    int skip = digits[static_cast<std::size_t>(i)];
    int v = 0;
    for (;; ++v) {
      if (used & (1u << v)) continue;
      if (skip == 0) break;
      --skip;
    }
    perm[static_cast<std::size_t>(i)] = v;
    used |= 1u << v;
  }
  return perm;
}

int perm_sign(std::span<const int> perm) {
  const std::size_t m = perm.size();
  std::vector<char> seen(m, 0);
  std::size_t cycles = 0;
  for (std::size_t s = 0; s < m; ++s) {
    if (seen[s]) continue;
    ++cycles;
    for (std::size_t v = s; !seen[v]; v = static_cast<std::size_t>(perm[v])) seen[v] = 1;
  }
  return ((m - cycles) % 2 == 0) ? 1 : -1;
}

std::vector<int> invert_perm(std::span<const int> perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  return inv;
}

}  // namespace toruslab
