#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "freecorr/bitstream.hpp"
#include "freecorr/cesaro.hpp"
#include "freecorr/laws.hpp"
#include "freecorr/marginal_state.hpp"
#include "freecorr/parallel.hpp"
#include "freecorr/partitions.hpp"
#include "freecorr/scalar.hpp"
#include "freecorr/shift.hpp"
#include "freecorr/word.hpp"

namespace freecorr {

// Single-copy centered generator, described by its moment table:
// moment(r) = <X^r> with moment(1) = 0.
class GeneratorMoments {
 public:
  static GeneratorMoments from_moments(std::vector<Rational> values) {
    if (values.empty()) throw std::invalid_argument("need at least the first moment");
    if (values.front() != 0) throw std::invalid_argument("generator must be centered");
    GeneratorMoments g;
    g.values_ = std::move(values);
    return g;
  }

  // Symmetric +-1 observable: even moments 1, odd moments 0.
  static GeneratorMoments pm_one(int max_order) {
    std::vector<Rational> v;
    for (int r = 1; r <= max_order; ++r) v.emplace_back(r % 2 == 0 ? 1 : 0);
    return from_moments(std::move(v));
  }

  Rational moment(std::size_t r) const {
    if (r == 0) return Rational(1);
    if (r > values_.size()) throw std::out_of_range("generator moment table too short");
    return values_[r - 1];
  }

  std::size_t max_order() const { return values_.size(); }

  MarginalState<Rational> state() const {
    return MarginalState<Rational>::from_function(
        [g = *this](const SymbolMonomial& m) { return g.moment(m.size()); });
  }

 private:
  std::vector<Rational> values_;
};

namespace detail {

inline constexpr std::int64_t kMaxCombinatorialCopies = 1000000;
inline constexpr int kMaxSumMomentOrder = 12;

inline void check_sum_moment_args(const GeneratorMoments& gen, std::int64_t n, int m,
                                  std::int64_t max_n, int max_m) {
  if (n < 1 || n > max_n) throw std::invalid_argument("copy count out of range");
  if (m < 1 || m > max_m) throw std::invalid_argument("moment order out of range");
  if (static_cast<std::size_t>(m) > gen.max_order())
    throw std::invalid_argument("generator moment table shorter than requested order");
}

inline bool has_singleton_block(std::span<const int> rgs, int k) {
  std::array<int, 16> count{};
  for (const int v : rgs) ++count[static_cast<std::size_t>(v)];
  for (int b = 0; b < k; ++b)
    if (count[static_cast<std::size_t>(b)] == 1) return true;
  return false;
}

inline Word pattern_word(std::span<const int> rgs) {
  std::vector<Letter> ls;
  ls.reserve(rgs.size());
  for (const int v : rgs) ls.push_back(letter(v + 1, ObservableSymbol::named("X")));
  return normalize(ls);
}

// Sum over set partitions of falling_factorial(N, blocks) times the law value
// of the induced copy pattern. A copy used exactly once contributes a bare
// centered factor, which every law annihilates, so those shapes are skipped.
inline Rational partition_numerator(LawKind law, const GeneratorMoments& gen, std::int64_t n,
                                    int m) {
  std::vector<std::int8_t> patterns;
  std::vector<std::int8_t> blocks;
  for_each_set_partition(m, [&](std::span<const int> rgs, int k) {
    if (has_singleton_block(rgs, k)) return;
    for (const int v : rgs) patterns.push_back(static_cast<std::int8_t>(v));
    blocks.push_back(static_cast<std::int8_t>(k));
  });

  std::vector<Rational> weights(static_cast<std::size_t>(m) + 1, Rational(0));
  for (int k = 1; k <= m; ++k)
    weights[static_cast<std::size_t>(k)] = Rational(falling_factorial(BigInt(n), k));

  const MarginalState<Rational> state = gen.state();
  const std::size_t count = blocks.size();
  const auto parts = parallel::chunked_map<Rational>(count, 1024, [&](std::size_t begin,
                                                                      std::size_t end,
                                                                      std::size_t) {
    std::array<int, 16> rgs{};
    std::map<Word, Rational> memo;  // subwords recur heavily across patterns
    Rational acc(0);
    for (std::size_t i = begin; i < end; ++i) {
      for (int j = 0; j < m; ++j)
        rgs[static_cast<std::size_t>(j)] = patterns[i * static_cast<std::size_t>(m) +
                                                    static_cast<std::size_t>(j)];
      const Word w = pattern_word(std::span<const int>(rgs.data(), static_cast<std::size_t>(m)));
      const Rational v = law == LawKind::free ? freecorr::detail::free_moment_memo(w, state, memo)
                                              : law_moment(law, w, state);
      if (v != 0) acc += weights[static_cast<std::size_t>(blocks[i])] * v;
    }
    return acc;
  });

  Rational total(0);
  for (const auto& part : parts) total += part;
  return total;
}

inline Rational scaled_or_throw(const Rational& numerator, std::int64_t n, int m) {
  if (numerator == 0) return Rational(0);
  if (m % 2 != 0)
    throw std::domain_error("odd moment scales by sqrt(N); use the floating form");
  BigInt denom = 1;
  for (int i = 0; i < m / 2; ++i) denom *= n;
  return numerator / Rational(denom);
}

}  // namespace detail

// Exact m-th moment of N^{-1/2} (X_1 + ... + X_N) for N independent copies
// under the chosen law.
inline Rational sum_moment_exact(LawKind law, const GeneratorMoments& gen, std::int64_t n,
                                 int m) {
  detail::check_sum_moment_args(gen, n, m, detail::kMaxCombinatorialCopies,
                                detail::kMaxSumMomentOrder);
  return detail::scaled_or_throw(detail::partition_numerator(law, gen, n, m), n, m);
}

inline double sum_moment(LawKind law, const GeneratorMoments& gen, std::int64_t n, int m) {
  detail::check_sum_moment_args(gen, n, m, detail::kMaxCombinatorialCopies,
                                detail::kMaxSumMomentOrder);
  const Rational numerator = detail::partition_numerator(law, gen, n, m);
  return to_double(numerator) / std::pow(static_cast<double>(n), static_cast<double>(m) / 2.0);
}

// Direct enumeration of all N^m copy-index tuples. Shares only the per-word
// law evaluation with the combinatorial path, so it checks the partition
// bookkeeping and the falling-factorial weights.
inline Rational sum_moment_brute(LawKind law, const GeneratorMoments& gen, std::int64_t n,
                                 int m) {
  detail::check_sum_moment_args(gen, n, m, 50, detail::kMaxSumMomentOrder);
  double tuples = 1;
  for (int i = 0; i < m; ++i) tuples *= static_cast<double>(n);
  if (tuples > 2e7) throw std::range_error("tuple enumeration too large; use sum_moment_exact");

  const MarginalState<Rational> state = gen.state();
  std::map<std::vector<int>, Rational> cache;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<int> canon(static_cast<std::size_t>(m), 0);
  std::vector<int> rank(static_cast<std::size_t>(n), 0);
  Rational total(0);
  for (;;) {
    std::fill(rank.begin(), rank.end(), -1);
    int next = 0;
    for (int i = 0; i < m; ++i) {
      int& r = rank[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      if (r < 0) r = next++;
      canon[static_cast<std::size_t>(i)] = r;
    }
    auto it = cache.find(canon);
    if (it == cache.end())
      it = cache.emplace(canon, law_moment(law,
                                           detail::pattern_word(std::span<const int>(
                                               canon.data(), canon.size())),
                                           state))
               .first;
    total += it->second;

    int i = m - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - 1) {
      idx[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
  }
  return detail::scaled_or_throw(total, n, m);
}

struct MomentSequence {
  std::vector<double> values;  // values[i] is the moment of order i + 1
  std::string label;
};

inline MomentSequence gaussian_moments(int max_order, double variance) {
  if (max_order < 1 || max_order > 16) throw std::invalid_argument("order must be in [1, 16]");
  if (variance < 0) throw std::invalid_argument("variance must be nonnegative");
  MomentSequence out{std::vector<double>(static_cast<std::size_t>(max_order), 0.0), "gaussian"};
  for (int k = 1; 2 * k <= max_order; ++k)
    out.values[static_cast<std::size_t>(2 * k - 1)] =
        static_cast<double>(double_factorial_odd(k)) * std::pow(variance, k);
  return out;
}

inline MomentSequence semicircle_moments(int max_order, double variance) {
  if (max_order < 1 || max_order > 16) throw std::invalid_argument("order must be in [1, 16]");
  if (variance < 0) throw std::invalid_argument("variance must be nonnegative");
  MomentSequence out{std::vector<double>(static_cast<std::size_t>(max_order), 0.0),
                     "semicircle"};
  for (int k = 1; 2 * k <= max_order; ++k)
    out.values[static_cast<std::size_t>(2 * k - 1)] =
        static_cast<double>(catalan(k)) * std::pow(variance, k);
  return out;
}

enum class MomentLaw { gaussian, semicircle, other };

struct Classification {
  MomentLaw label = MomentLaw::other;
  double gaussian_distance = 0.0;
  double semicircle_distance = 0.0;

  double distance() const { return std::min(gaussian_distance, semicircle_distance); }
};

inline const char* moment_law_name(MomentLaw law) {
  switch (law) {
    case MomentLaw::gaussian:
      return "gaussian";
    case MomentLaw::semicircle:
      return "semicircle";
    case MomentLaw::other:
      return "other";
  }
  return "other";
}

// Rescales to unit variance and takes the worst relative deviation of the
// even moments from each reference law. Moments through order 4 are required:
// the two laws first part at the fourth moment.
inline Classification classify(const MomentSequence& seq, double threshold = 0.05) {
  if (seq.values.size() < 4) throw std::invalid_argument("need moments through order 4");
  const double m2 = seq.values[1];
  if (!(m2 > 0)) throw std::domain_error("second moment must be positive");

  Classification out;
  double scale = 1.0;
  for (int k = 1; 2 * static_cast<std::size_t>(k) <= seq.values.size(); ++k) {
    scale /= m2;
    const double scaled = seq.values[static_cast<std::size_t>(2 * k - 1)] * scale;
    const double gauss = static_cast<double>(double_factorial_odd(k));
    const double semi = static_cast<double>(catalan(k));
    out.gaussian_distance = std::max(out.gaussian_distance, std::abs(scaled - gauss) / gauss);
    out.semicircle_distance = std::max(out.semicircle_distance, std::abs(scaled - semi) / semi);
  }
  if (std::min(out.gaussian_distance, out.semicircle_distance) < threshold)
    out.label = out.gaussian_distance <= out.semicircle_distance ? MomentLaw::gaussian
                                                                 : MomentLaw::semicircle;
  return out;
}

// Positive semidefiniteness of the Hankel matrix [m_{i+j}], m_0 = 1, the
// basic sanity check that a sequence can be a moment sequence at all.
inline bool hankel_psd(const MomentSequence& seq, double tol = 1e-9) {
  const std::size_t n = seq.values.size() / 2 + 1;
  if (n > 9) throw std::invalid_argument("hankel check supported through order 16");
  std::array<std::array<double, 9>, 9> a{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i][j] = i + j == 0 ? 1.0 : seq.values[i + j - 1];

  for (std::size_t p = 0; p < n; ++p) {
    const double pivot = a[p][p];
    if (pivot < -tol) return false;
    if (pivot <= tol) {
      for (std::size_t j = p + 1; j < n; ++j)
        if (std::abs(a[p][j]) > tol) return false;
      continue;
    }
    for (std::size_t i = p + 1; i < n; ++i) {
      const double f = a[i][p] / pivot;
      for (std::size_t j = p; j < n; ++j) a[i][j] -= f * a[p][j];
    }
  }
  return true;
}

namespace detail {

inline void check_shift_fluct_args(std::int64_t n, int m) {
  if (n < 1 || n > 50) throw std::invalid_argument("copy count out of range");
  if (m < 1 || m > 8) throw std::invalid_argument("moment order out of range");
}

inline bool all_blocks_even(std::span<const int> rgs, int k) {
  std::array<int, 16> count{};
  for (const int v : rgs) ++count[static_cast<std::size_t>(v)];
  for (int b = 0; b < k; ++b)
    if (count[static_cast<std::size_t>(b)] % 2 != 0) return false;
  return true;
}

}  // namespace detail

// Moment of the shift-model fluctuation sum: every copy pattern's word is
// Cesaro averaged over well separated times, then combined with the same
// falling-factorial weights as the law-based sums. Cancellation preserves
// the per-time parity, so patterns with an odd block contribute exactly zero
// and are skipped.
inline double shift_fluctuation_moment(const BitStream& stream, std::int64_t n, int m,
                                       std::int64_t horizon, std::int64_t min_gap = 1) {
  detail::check_shift_fluct_args(n, m);
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");

  double total = 0.0;
  for_each_set_partition(m, [&](std::span<const int> rgs, int k) {
    if (!detail::all_blocks_even(rgs, k)) return;
    std::vector<int> copies;
    copies.reserve(rgs.size());
    for (const int v : rgs) copies.push_back(v + 1);
    const TimePattern pat = TimePattern::from_copies(copies);

    const auto eval = [&](std::span<const std::int64_t> times) {
      std::array<std::int64_t, 16> buf{};
      for (std::size_t i = 0; i < rgs.size(); ++i)
        buf[i] = times[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])];
      return expectation_of_times(buf.data(), rgs.size(), stream);
    };
    const auto res = average(pat, eval, {horizon}, min_gap);
    total += to_double(Rational(falling_factorial(BigInt(n), k))) * res.mean;
  });
  return total / std::pow(static_cast<double>(n), static_cast<double>(m) / 2.0);
}

// One estimate per schedule rung; rungs must carry a single shared horizon
// because the grid dimension varies with the partition shape.
inline std::vector<double> shift_fluctuation_moments(const BitStream& stream, std::int64_t n,
                                                     int m, const AveragingSchedule& schedule,
                                                     std::int64_t min_gap = 1) {
  std::vector<double> out;
  out.reserve(schedule.rungs.size());
  for (const auto& rung : schedule.rungs) {
    if (rung.size() != 1)
      throw std::invalid_argument("per-axis horizons do not transfer across partition shapes");
    out.push_back(shift_fluctuation_moment(stream, n, m, rung[0], min_gap));
  }
  return out;
}

// Exact free-shift value: a pattern contributes 1 when its word cancels to
// the identity under stack reduction, else 0.
inline Rational free_shift_fluctuation_moment(std::int64_t n, int m) {
  if (n < 1 || n > detail::kMaxCombinatorialCopies)
    throw std::invalid_argument("copy count out of range");
  if (m < 1 || m > detail::kMaxSumMomentOrder)
    throw std::invalid_argument("moment order out of range");

  Rational total(0);
  std::vector<int> copies(static_cast<std::size_t>(m), 0);
  for_each_set_partition(m, [&](std::span<const int> rgs, int k) {
    for (std::size_t i = 0; i < rgs.size(); ++i) copies[i] = rgs[i] + 1;
    if (free_shift_expectation(std::span<const int>(copies.data(), copies.size())) != 0)
      total += Rational(falling_factorial(BigInt(n), k));
  });
  return detail::scaled_or_throw(total, n, m);
}

}  // namespace freecorr
