#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "freecorr/scalar.hpp"

namespace freecorr {

// Visit every set partition of {0..m-1} as a restricted growth string:
// rgs[0] = 0 and rgs[i+1] <= 1 + max(rgs[0..i]). fn(rgs, block_count).
template <class Fn>
void for_each_set_partition(int m, Fn&& fn) {
  if (m < 0) throw std::invalid_argument("partition ground set must be >= 0");
  if (m == 0) {
    fn(std::span<const int>{}, 0);
    return;
  }
  std::vector<int> rgs(static_cast<std::size_t>(m), 0);
  std::vector<int> maxes(static_cast<std::size_t>(m), 0);
  for (;;) {
    fn(std::span<const int>(rgs.data(), rgs.size()), maxes[static_cast<std::size_t>(m - 1)] + 1);
    int i = m - 1;
    while (i > 0 && rgs[static_cast<std::size_t>(i)] == maxes[static_cast<std::size_t>(i - 1)] + 1)
      --i;
    if (i == 0) break;
    ++rgs[static_cast<std::size_t>(i)];
    maxes[static_cast<std::size_t>(i)] =
        std::max(maxes[static_cast<std::size_t>(i - 1)], rgs[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < m; ++j) {
      rgs[static_cast<std::size_t>(j)] = 0;
      maxes[static_cast<std::size_t>(j)] = maxes[static_cast<std::size_t>(j - 1)];
    }
  }
}

// A partition crosses iff two blocks alternate a..b..a..b along the word.
inline bool is_non_crossing(std::span<const int> rgs) {
  int nb = 0;
  for (const int v : rgs) nb = std::max(nb, v + 1);
  for (int a = 0; a < nb; ++a)
    for (int b = a + 1; b < nb; ++b) {
      int last = -1, alternations = 0;
      for (const int v : rgs) {
        if (v != a && v != b) continue;
        if (v != last) {
          ++alternations;
          last = v;
        }
      }
      if (alternations >= 4) return false;
    }
  return true;
}

inline BigInt falling_factorial(const BigInt& n, int k) {
  if (k < 0) throw std::invalid_argument("falling factorial needs k >= 0");
  BigInt out = 1;
  for (int i = 0; i < k; ++i) out *= n - i;
  return out;
}

inline std::uint64_t catalan(int k) {
  if (k < 0 || k > 30) throw std::invalid_argument("catalan supported for 0 <= k <= 30");
  // C_0 = 1, C_{k+1} = C_k * 2(2k+1)/(k+2); exact at every step
  std::uint64_t c = 1;
  for (int i = 0; i < k; ++i)
    c = c * 2 * (2 * static_cast<std::uint64_t>(i) + 1) / (static_cast<std::uint64_t>(i) + 2);
  return c;
}

inline std::uint64_t double_factorial_odd(int k) {
  if (k < 0 || k > 16) throw std::invalid_argument("(2k-1)!! supported for 0 <= k <= 16");
  std::uint64_t out = 1;
  for (int i = 1; i <= k; ++i) out *= 2 * static_cast<std::uint64_t>(i) - 1;
  return out;
}

}  // namespace freecorr
