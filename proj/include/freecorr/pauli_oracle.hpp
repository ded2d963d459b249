#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "freecorr/bitstream.hpp"
#include "freecorr/shift.hpp"

namespace freecorr {

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

// Tensor product of single-site Paulis with a tracked phase i^phase_power.
struct PauliString {
  int phase_power = 0;  // mod 4
  std::vector<PauliLetter> letters;

  static PauliString identity(std::size_t n) {
    return {0, std::vector<PauliLetter>(n, PauliLetter::I)};
  }

  bool letters_are_identity() const {
    return std::all_of(letters.begin(), letters.end(),
                       [](PauliLetter l) { return l == PauliLetter::I; });
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;
};

namespace detail {

struct SiteProduct {
  PauliLetter letter;
  int phase_power;
};

// P.Q site table; phases follow XY = iZ and cyclic relatives.
inline SiteProduct site_product(PauliLetter p, PauliLetter q) {
  using P = PauliLetter;
  static constexpr std::array<SiteProduct, 16> table = {{
      {P::I, 0}, {P::X, 0}, {P::Y, 0}, {P::Z, 0},  // I.
      {P::X, 0}, {P::I, 0}, {P::Z, 1}, {P::Y, 3},  // X.
      {P::Y, 0}, {P::Z, 3}, {P::I, 0}, {P::X, 1},  // Y.
      {P::Z, 0}, {P::Y, 1}, {P::X, 3}, {P::I, 0},  // Z.
  }};
  return table[static_cast<std::size_t>(p) * 4 + static_cast<std::size_t>(q)];
}

}  // namespace detail

inline PauliString multiply(const PauliString& a, const PauliString& b) {
  if (a.letters.size() != b.letters.size())
    throw std::invalid_argument("pauli strings act on different site counts");
  PauliString out;
  out.phase_power = a.phase_power + b.phase_power;
  out.letters.resize(a.letters.size());
  for (std::size_t i = 0; i < a.letters.size(); ++i) {
    const auto sp = detail::site_product(a.letters[i], b.letters[i]);
    out.letters[i] = sp.letter;
    out.phase_power += sp.phase_power;
  }
  out.phase_power &= 3;
  return out;
}

// Generalized Jordan-Wigner image of e(t_k) on one site per distinct time:
// a Z on every earlier site whose lag anticommutes, an X on site k.
inline std::map<std::int64_t, PauliString> represent(const std::vector<std::int64_t>& times,
                                                     const BitStream& stream) {
  if (times.size() > 16) throw std::invalid_argument("pauli oracle supports at most 16 sites");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i - 1] >= times[i])
      throw std::invalid_argument("pauli oracle needs strictly increasing times");
  std::map<std::int64_t, PauliString> images;
  const std::size_t n = times.size();
  for (std::size_t k = 0; k < n; ++k) {
    PauliString p = PauliString::identity(n);
    for (std::size_t j = 0; j < k; ++j)
      if (stream.bit(times[k] - times[j]) == 1) p.letters[j] = PauliLetter::Z;
    p.letters[k] = PauliLetter::X;
    images[times[k]] = std::move(p);
  }
  return images;
}

// Normalized trace of the represented word: nonzero only for the identity
// string, where the accumulated phase must be real.
inline int trace_expectation(const TimedWord& w, const BitStream& stream) {
  std::vector<std::int64_t> distinct = w.times;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const auto images = represent(distinct, stream);
  PauliString acc = PauliString::identity(distinct.size());
  for (const auto t : w.times) acc = multiply(acc, images.at(t));
  if (!acc.letters_are_identity()) return 0;
  if (acc.phase_power == 0) return 1;
  if (acc.phase_power == 2) return -1;
  throw std::logic_error("identity pauli string with imaginary phase");
}

}  // namespace freecorr
