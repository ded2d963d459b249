#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "freecorr/bitstream.hpp"
#include "freecorr/koopman.hpp"
#include "freecorr/polynomial.hpp"
#include "freecorr/scalar.hpp"
#include "freecorr/shift.hpp"
#include "freecorr/word.hpp"

// Hand-rolled generators; every test seeds its own engine so failures replay.
namespace testsupport {

inline freecorr::ObservableSymbol random_symbol(std::mt19937_64& g, bool allow_identity = false) {
  static const char* names[] = {"A", "B", "C", "D"};
  if (allow_identity && g() % 6 == 0) return freecorr::ObservableSymbol::identity();
  return freecorr::ObservableSymbol::named(names[g() % 4], g() % 2 == 0);
}

inline freecorr::Letter random_letter(std::mt19937_64& g, int max_copy = 3,
                                      bool allow_identity = true) {
  freecorr::SymbolMonomial m;
  const std::size_t len = 1 + g() % 2;
  for (std::size_t i = 0; i < len; ++i) m.push_back(random_symbol(g, allow_identity));
  return {static_cast<int>(1 + g() % max_copy), std::move(m)};
}

inline std::vector<freecorr::Letter> random_letters(std::mt19937_64& g, std::size_t max_len,
                                                    int max_copy = 3) {
  std::vector<freecorr::Letter> out;
  const std::size_t len = g() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) out.push_back(random_letter(g, max_copy));
  return out;
}

inline freecorr::Word random_word(std::mt19937_64& g, std::size_t max_len, int max_copy = 3) {
  return freecorr::normalize(random_letters(g, max_len, max_copy));
}

inline freecorr::Polynomial<freecorr::Complex> random_polynomial(std::mt19937_64& g,
                                                                 std::size_t max_terms = 3) {
  freecorr::Polynomial<freecorr::Complex> p;
  const std::size_t n = 1 + g() % max_terms;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = static_cast<double>(static_cast<int>(g() % 7)) - 3.0;
    const double im = static_cast<double>(static_cast<int>(g() % 7)) - 3.0;
    p.add_term(random_word(g, 3), freecorr::Complex(re, im));
  }
  return p;
}

inline freecorr::BitStream random_stream(std::mt19937_64& g) {
  switch (g() % 5) {
    case 0:
      return freecorr::BitStream::constant(static_cast<int>(g() % 2));
    case 1: {
      std::vector<std::uint8_t> pat;
      const std::size_t len = 1 + g() % 5;
      for (std::size_t i = 0; i < len; ++i) pat.push_back(static_cast<std::uint8_t>(g() % 2));
      return freecorr::BitStream::periodic(std::move(pat));
    }
    case 2:
      return freecorr::BitStream::thue_morse();
    case 3:
      return freecorr::BitStream::bernoulli(0.25 * static_cast<double>(1 + g() % 3), g());
    default:
      return freecorr::BitStream::constant(1);
  }
}

// Small sparse trig polynomial; c0 kept nonzero so means do not degenerate.
inline freecorr::FourierObservable random_fourier(std::mt19937_64& g, int max_mode = 4) {
  freecorr::FourierObservable f;
  const auto coeff = [&g] {
    const double re = 0.25 * (static_cast<double>(static_cast<int>(g() % 9)) - 4.0);
    const double im = 0.25 * (static_cast<double>(static_cast<int>(g() % 9)) - 4.0);
    return freecorr::Complex(re, im);
  };
  f.set_mode(freecorr::BigInt(0), freecorr::Complex(0.5 + 0.125 * static_cast<double>(g() % 8),
                                                    0.25 * static_cast<double>(g() % 3)));
  const std::size_t extra = 1 + g() % 3;
  for (std::size_t i = 0; i < extra; ++i) {
    const int mag = 1 + static_cast<int>(g() % static_cast<unsigned>(max_mode));
    f.set_mode(freecorr::BigInt(g() % 2 == 0 ? mag : -mag), coeff());
  }
  return f;
}

inline freecorr::FiniteRankOperator random_finite_rank(std::mt19937_64& g, int max_mode = 4) {
  freecorr::FiniteRankOperator op;
  const std::size_t terms = 1 + g() % 2;
  for (std::size_t i = 0; i < terms; ++i) {
    const double re = 0.5 * (static_cast<double>(static_cast<int>(g() % 5)) - 2.0);
    op.add_term(freecorr::Complex(re == 0.0 ? 1.0 : re, 0.25 * static_cast<double>(g() % 3)),
                {random_fourier(g, max_mode), random_fourier(g, max_mode)});
  }
  if (g() % 2 == 0)
    op.add_identity(freecorr::Complex(0.5 * static_cast<double>(1 + g() % 3), 0.0));
  return op;
}

inline freecorr::TimedWord random_timed_word(std::mt19937_64& g, std::size_t max_len,
                                             std::int64_t max_time = 20) {
  freecorr::TimedWord w;
  const std::size_t len = g() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i)
    w.times.push_back(static_cast<std::int64_t>(1 + g() % max_time));
  return w;
}

}  // namespace testsupport
