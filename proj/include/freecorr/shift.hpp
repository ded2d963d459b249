#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "freecorr/bitstream.hpp"

namespace freecorr {

// e(t1) e(t2) ... e(tn); order significant, repeats allowed.
struct TimedWord {
  std::vector<std::int64_t> times;

  friend auto operator<=>(const TimedWord&, const TimedWord&) = default;
};

// Fully reduced: strictly increasing times and an overall sign.
struct SignedReducedWord {
  int sign = 1;
  std::vector<std::int64_t> times;

  friend auto operator<=>(const SignedReducedWord&, const SignedReducedWord&) = default;
};

inline TimedWord shifted(const TimedWord& w, std::int64_t dt) {
  TimedWord out = w;
  for (auto& t : out.times) t += dt;
  return out;
}

namespace detail {

// Insertion sort that keeps [0, len) strictly increasing. Moving e(u) past
// e(t) with u > t costs a factor (-1)^{a(u - t)}; meeting an equal time
// cancels the pair via e(t)^2 = 1. Returns the sign, shrinks n to the
// reduced length.
inline int reduce_times(std::int64_t* times, std::size_t& n, const BitStream& stream) {
  int sign = 1;
  std::size_t len = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t t = times[i];
    std::size_t pos = len;
    while (pos > 0 && times[pos - 1] > t) {
      if (stream.bit(times[pos - 1] - t) == 1) sign = -sign;
      --pos;
    }
    if (pos > 0 && times[pos - 1] == t) {
      for (std::size_t j = pos; j < len; ++j) times[j - 1] = times[j];
      --len;
    } else {
      for (std::size_t j = len; j > pos; --j) times[j] = times[j - 1];
      times[pos] = t;
      ++len;
    }
  }
  n = len;
  return sign;
}

}  // namespace detail

inline SignedReducedWord reduce(const TimedWord& w, const BitStream& stream) {
  std::vector<std::int64_t> buf = w.times;
  std::size_t n = buf.size();
  const int sign = detail::reduce_times(buf.data(), n, stream);
  buf.resize(n);
  return {sign, std::move(buf)};
}

// Tracial state: +-1 when the word reduces to a signed identity, else 0.
// Allocation-free for short words, which is what the averaging loops hit.
inline int expectation_of_times(const std::int64_t* src, std::size_t n, const BitStream& stream) {
  if (n <= 64) {
    std::int64_t buf[64];
    std::copy(src, src + n, buf);
    std::size_t len = n;
    const int sign = detail::reduce_times(buf, len, stream);
    return len == 0 ? sign : 0;
  }
  std::vector<std::int64_t> buf(src, src + n);
  std::size_t len = n;
  const int sign = detail::reduce_times(buf.data(), len, stream);
  return len == 0 ? sign : 0;
}

inline int expectation(const TimedWord& w, const BitStream& stream) {
  return expectation_of_times(w.times.data(), w.times.size(), stream);
}

// Free shift: no commutation relations at all, only e(t)^2 = 1, so a word
// reduces like a Dyck path over copy indices.
inline int free_shift_expectation(std::span<const int> copies) {
  std::vector<int> stack;
  for (int c : copies) {
    if (!stack.empty() && stack.back() == c)
      stack.pop_back();
    else
      stack.push_back(c);
  }
  return stack.empty() ? 1 : 0;
}

// <[e(t), e(s)]* [e(t), e(s)]> expanded into four timed words.
inline double commutator_norm_sq(std::int64_t t, std::int64_t s, const BitStream& stream) {
  if (t == s) throw std::invalid_argument("commutator_norm_sq needs t != s");
  std::map<TimedWord, int> comm;
  comm[TimedWord{{t, s}}] += 1;
  comm[TimedWord{{s, t}}] -= 1;
  std::map<TimedWord, int> adj;
  for (const auto& [w, c] : comm) {
    TimedWord r{std::vector<std::int64_t>(w.times.rbegin(), w.times.rend())};
    adj[r] += c;
  }
  double out = 0.0;
  for (const auto& [wa, ca] : adj)
    for (const auto& [wb, cb] : comm) {
      TimedWord w = wa;
      w.times.insert(w.times.end(), wb.times.begin(), wb.times.end());
      out += static_cast<double>(ca * cb * expectation(w, stream));
    }
  return out;
}

}  // namespace freecorr
