#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace toruslab {

std::uint64_t factorial(int m);

/// Lexicographic rank of a permutation of {0, ..., m-1} (Lehmer code).
std::uint64_t lehmer_rank(std::span<const int> perm);

std::vector<int> lehmer_unrank(std::uint64_t rank, int m);

/// Parity of a permutation given as a map i -> perm[i].
int perm_sign(std::span<const int> perm);

std::vector<int> invert_perm(std::span<const int> perm);

}  // namespace toruslab
