#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace freecorr {

// One abstract observable symbol; `adjoint_flag` marks X*.
struct ObservableSymbol {
  std::string name;
  bool adjoint_flag = false;
  bool is_identity = false;

  static ObservableSymbol identity() { return {"1", false, true}; }
  static ObservableSymbol named(std::string n, bool adjoint = false) {
    return {std::move(n), adjoint, false};
  }

  ObservableSymbol adjoint() const {
    if (is_identity) return *this;  // the identity is self-adjoint
    return {name, !adjoint_flag, false};
  }

  friend auto operator<=>(const ObservableSymbol&, const ObservableSymbol&) = default;
};

// An ordered product of symbols, all living in a single copy of the base algebra.
using SymbolMonomial = std::vector<ObservableSymbol>;

inline SymbolMonomial monomial_adjoint(const SymbolMonomial& m) {
  SymbolMonomial out(m.rbegin(), m.rend());
  for (auto& s : out) s = s.adjoint();
  return out;
}

inline std::string symbol_str(const ObservableSymbol& s) {
  return s.adjoint_flag ? s.name + "*" : s.name;
}

inline std::string monomial_str(const SymbolMonomial& m) {
  if (m.empty()) return "1";
  std::string out;
  for (const auto& s : m) {
    if (!out.empty()) out += ' ';
    out += symbol_str(s);
  }
  return out;
}

// One letter of a word: a monomial inside copy `copy_index` (>= 1).
struct Letter {
  int copy_index = 1;
  SymbolMonomial factors;

  friend auto operator<=>(const Letter&, const Letter&) = default;
};

inline Letter letter(int copy_index, ObservableSymbol s) {
  return {copy_index, SymbolMonomial{std::move(s)}};
}

inline Letter letter(int copy_index, SymbolMonomial m) { return {copy_index, std::move(m)}; }

// A word of the asymptotic algebra in normal form: no identity factors, no
// empty letters, no two consecutive letters with equal copy index.
struct Word {
  std::vector<Letter> letters;

  bool empty() const { return letters.empty(); }
  std::size_t size() const { return letters.size(); }

  friend auto operator<=>(const Word&, const Word&) = default;
};

// Normal form: drop identity factors, then merge consecutive letters that
// share a copy index into a single monomial letter.
inline Word normalize(std::span<const Letter> raw) {
  Word w;
  for (const Letter& l : raw) {
    if (l.copy_index < 1) throw std::invalid_argument("copy index must be >= 1");
    SymbolMonomial kept;
    for (const auto& s : l.factors)
      if (!s.is_identity) kept.push_back(s);
    if (kept.empty()) continue;
    if (!w.letters.empty() && w.letters.back().copy_index == l.copy_index) {
      auto& dst = w.letters.back().factors;
      dst.insert(dst.end(), kept.begin(), kept.end());
    } else {
      w.letters.push_back({l.copy_index, std::move(kept)});
    }
  }
  return w;
}

inline Word normalize(const std::vector<Letter>& raw) {
  return normalize(std::span<const Letter>(raw.data(), raw.size()));
}

inline bool is_normal_form(const Word& w) {
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    const Letter& l = w.letters[i];
    if (l.copy_index < 1 || l.factors.empty()) return false;
    for (const auto& s : l.factors)
      if (s.is_identity) return false;
    if (i > 0 && w.letters[i - 1].copy_index == l.copy_index) return false;
  }
  return true;
}

inline Word word_adjoint(const Word& w) {
  Word out;
  out.letters.reserve(w.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
    out.letters.push_back({it->copy_index, monomial_adjoint(it->factors)});
  return out;
}

inline std::string letter_str(const Letter& l) {
  std::string body =
      l.factors.size() == 1 ? symbol_str(l.factors[0]) : "(" + monomial_str(l.factors) + ")";
  return body + "_" + std::to_string(l.copy_index);
}

inline std::string word_str(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  for (const auto& l : w.letters) {
    if (!out.empty()) out += ' ';
    out += letter_str(l);
  }
  return out;
}

}  // namespace freecorr
