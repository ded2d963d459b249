#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "freecorr/parallel.hpp"
#include "freecorr/scalar.hpp"

namespace freecorr {

// Copy pattern of a multi-time moment; canonical form relabels copies
// 1..s in order of first appearance, so "313" and "121" are the same pattern.
struct TimePattern {
  std::vector<int> slots;

  static TimePattern from_copies(std::span<const int> raw) {
    TimePattern p;
    std::vector<int> seen;
    for (const int c : raw) {
      const auto it = std::find(seen.begin(), seen.end(), c);
      if (it == seen.end()) {
        seen.push_back(c);
        p.slots.push_back(static_cast<int>(seen.size()));
      } else {
        p.slots.push_back(static_cast<int>(it - seen.begin()) + 1);
      }
    }
    return p;
  }

  static TimePattern from_copies(const std::vector<int>& raw) {
    return from_copies(std::span<const int>(raw.data(), raw.size()));
  }

  int distinct_count() const {
    return slots.empty() ? 0 : *std::max_element(slots.begin(), slots.end());
  }

  friend bool operator==(const TimePattern&, const TimePattern&) = default;
};

namespace detail {

constexpr int kMaxAxes = 16;

template <class R>
struct GridAccum {
  using type = double;
};
template <>
struct GridAccum<std::int64_t> {
  using type = std::int64_t;
};
template <>
struct GridAccum<int> {
  using type = std::int64_t;
};
template <>
struct GridAccum<Complex> {
  using type = Complex;
};

template <class R>
struct GridMean {
  using type = double;
};
template <>
struct GridMean<Complex> {
  using type = Complex;
};

inline bool well_separated(const std::int64_t* times, int s, std::int64_t min_gap) {
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j) {
      const std::int64_t d = times[i] > times[j] ? times[i] - times[j] : times[j] - times[i];
      if (d < min_gap) return false;
    }
  return true;
}

}  // namespace detail

template <class R>
struct GridResult {
  R mean{};
  std::uint64_t points = 0;  // grid points actually averaged
};

// Mean of f over {0..T_1} x ... x {0..T_s}, dropping points where two axes
// come closer than min_gap. Axis 0 is the fastest index; sums accumulate per
// fixed-size chunk and combine in chunk order, so results do not depend on
// the worker count.
template <class F>
auto grid_accumulate(std::span<const std::int64_t> horizons, F&& f, std::int64_t min_gap = 0)
    -> GridResult<typename detail::GridMean<
        std::remove_cvref_t<std::invoke_result_t<F&, std::span<const std::int64_t>>>>::type> {
  using R = std::remove_cvref_t<std::invoke_result_t<F&, std::span<const std::int64_t>>>;
  using Acc = typename detail::GridAccum<R>::type;
  using Mean = typename detail::GridMean<R>::type;

  const int s = static_cast<int>(horizons.size());
  if (s < 1 || s > detail::kMaxAxes) throw std::invalid_argument("grid needs 1 to 16 axes");
  std::uint64_t sizes[detail::kMaxAxes];
  std::uint64_t total = 1;
  for (int j = 0; j < s; ++j) {
    if (horizons[j] < 0) throw std::invalid_argument("horizons must be >= 0");
    sizes[j] = static_cast<std::uint64_t>(horizons[j]) + 1;
    if (total > std::uint64_t{1} << 62 || total * sizes[j] / sizes[j] != total)
      throw std::range_error("grid is too large to enumerate");
    total *= sizes[j];
  }

  struct Part {
    Acc sum{};
    std::uint64_t kept = 0;
  };
  constexpr std::uint64_t kChunk = std::uint64_t{1} << 16;
  const auto parts = parallel::chunked_map<Part>(
      total, kChunk, [&](std::uint64_t begin, std::uint64_t end, std::uint64_t) {
        Part part;
        std::int64_t times[detail::kMaxAxes];
        std::uint64_t digits[detail::kMaxAxes];
        std::uint64_t rem = begin;
        for (int j = 0; j < s; ++j) {
          digits[j] = rem % sizes[j];
          times[j] = static_cast<std::int64_t>(digits[j]);
          rem /= sizes[j];
        }
        const std::span<const std::int64_t> view(times, static_cast<std::size_t>(s));
        for (std::uint64_t u = begin; u < end; ++u) {
          if (min_gap <= 0 || detail::well_separated(times, s, min_gap)) {
            part.sum += static_cast<Acc>(f(view));
            ++part.kept;
          }
          for (int j = 0; j < s; ++j) {
            if (++digits[j] < sizes[j]) {
              times[j] = static_cast<std::int64_t>(digits[j]);
              break;
            }
            digits[j] = 0;
            times[j] = 0;
          }
        }
        return part;
      });

  Acc sum{};
  std::uint64_t kept = 0;
  for (const auto& part : parts) {
    sum += part.sum;
    kept += part.kept;
  }
  if (kept == 0) throw std::domain_error("every grid point was excluded by min_gap");
  GridResult<Mean> out;
  out.mean = static_cast<Mean>(sum) / static_cast<double>(kept);
  out.points = kept;
  return out;
}

// Cesaro average of an evaluator over the pattern's distinct-copy grid.
// One horizon broadcasts to every axis; otherwise one per axis is required.
// The evaluator receives times[k] = time assigned to canonical copy k+1.
template <class F>
auto average(const TimePattern& pattern, F&& f, std::span<const std::int64_t> horizons,
             std::int64_t min_gap = 0) {
  const int s = pattern.distinct_count();
  if (s == 0) throw std::invalid_argument("pattern has no copies to average over");
  std::vector<std::int64_t> hs;
  if (horizons.size() == 1) {
    hs.assign(static_cast<std::size_t>(s), horizons[0]);
  } else if (static_cast<int>(horizons.size()) == s) {
    hs.assign(horizons.begin(), horizons.end());
  } else {
    throw std::invalid_argument("need one horizon or one per distinct copy");
  }
  return grid_accumulate(std::span<const std::int64_t>(hs.data(), hs.size()),
                         std::forward<F>(f), min_gap);
}

template <class F>
auto average(const TimePattern& pattern, F&& f, std::initializer_list<std::int64_t> horizons,
             std::int64_t min_gap = 0) {
  return average(pattern, std::forward<F>(f),
                 std::span<const std::int64_t>(horizons.begin(), horizons.size()), min_gap);
}

// average restricted to well separated time tuples; min_gap >= 1 drops every
// point with two copies at equal times.
template <class F>
auto diagonal_skip_average(const TimePattern& pattern, F&& f,
                           std::span<const std::int64_t> horizons, std::int64_t min_gap) {
  if (min_gap < 0) throw std::invalid_argument("min_gap must be >= 0");
  return average(pattern, std::forward<F>(f), horizons, min_gap);
}

template <class F>
auto diagonal_skip_average(const TimePattern& pattern, F&& f,
                           std::initializer_list<std::int64_t> horizons, std::int64_t min_gap) {
  if (min_gap < 0) throw std::invalid_argument("min_gap must be >= 0");
  return average(pattern, std::forward<F>(f), horizons, min_gap);
}

// Sequence of horizon tuples to sweep. equal() broadcasts each T to all
// axes; staircase() grows inner axes as T^2, T^4, ... so iterated limits are
// approximated with the innermost average far ahead of the outer ones.
struct AveragingSchedule {
  std::vector<std::vector<std::int64_t>> rungs;

  static AveragingSchedule equal(std::vector<std::int64_t> ts) {
    AveragingSchedule s;
    for (const auto t : ts) s.rungs.push_back({t});
    return s;
  }

  static AveragingSchedule staircase(std::vector<std::int64_t> bases, int axes) {
    if (axes < 1 || axes > detail::kMaxAxes)
      throw std::invalid_argument("staircase needs 1 to 16 axes");
    AveragingSchedule s;
    for (const auto base : bases) {
      if (base < 1) throw std::invalid_argument("staircase base must be >= 1");
      std::vector<std::int64_t> hs(static_cast<std::size_t>(axes));
      for (int j = 0; j < axes; ++j) {
        // axis 0 is the innermost sum, so it gets the fastest growth
        __int128 h = base;
        for (int doublings = 0; doublings < axes - 1 - j; ++doublings) {
          h = h * h;
          if (h > 1000000000000000LL) throw std::range_error("staircase horizon overflow");
        }
        hs[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(h);
      }
      s.rungs.push_back(std::move(hs));
    }
    return s;
  }
};

template <class R>
struct ConvergenceRow {
  std::vector<std::int64_t> horizons;
  R estimate{};
  std::optional<double> delta;  // |estimate - previous|, absent on the first rung
};

template <class R>
struct ConvergenceReport {
  std::vector<ConvergenceRow<R>> rows;
  bool deltas_nonincreasing = true;  // false flags an apparently non-Cauchy sweep
};

template <class F>
auto convergence_report(const TimePattern& pattern, F&& f, const AveragingSchedule& schedule,
                        std::int64_t min_gap = 0) {
  using Mean = decltype(average(pattern, f, std::span<const std::int64_t>(
                                                schedule.rungs.at(0).data(),
                                                schedule.rungs.at(0).size()),
                                min_gap)
                            .mean);
  ConvergenceReport<Mean> report;
  std::optional<Mean> prev;
  std::optional<double> prev_delta;
  for (const auto& rung : schedule.rungs) {
    const auto res =
        average(pattern, f, std::span<const std::int64_t>(rung.data(), rung.size()), min_gap);
    ConvergenceRow<Mean> row;
    row.horizons = rung;
    row.estimate = res.mean;
    if (prev) {
      row.delta = std::abs(res.mean - *prev);
      if (prev_delta && *row.delta > *prev_delta) report.deltas_nonincreasing = false;
      prev_delta = row.delta;
    }
    prev = res.mean;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace freecorr
