#pragma once

#include <map>
#include <utility>

#include "freecorr/scalar.hpp"
#include "freecorr/word.hpp"

namespace freecorr {

// Finite scalar combination of normal-form words. Terms with zero coefficient
// are never stored, so operator== is structural equality of values.
template <class S>
class Polynomial {
 public:
  using TermMap = std::map<Word, S>;

  Polynomial() = default;
  explicit Polynomial(S scalar) { add_term(Word{}, std::move(scalar)); }

  static Polynomial zero() { return {}; }
  static Polynomial identity() { return Polynomial(S(1)); }

  static Polynomial from_word(Word w, S coeff = S(1)) {
    Polynomial p;
    p.add_term(std::move(w), std::move(coeff));
    return p;
  }

  static Polynomial from_letter(Letter l, S coeff = S(1)) {
    const Letter raw[1] = {std::move(l)};
    return from_word(normalize(std::span<const Letter>(raw, 1)), std::move(coeff));
  }

  void add_term(Word w, S coeff) {
    if (is_zero(coeff)) return;
    auto [it, inserted] = terms_.emplace(std::move(w), coeff);
    if (!inserted) {
      it->second = it->second + coeff;
      if (is_zero(it->second)) terms_.erase(it);
    }
  }

  bool is_zero_poly() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }

  Polynomial adjoint() const {
    Polynomial out;
    for (const auto& [w, c] : terms_) out.add_term(word_adjoint(w), conjugate(c));
    return out;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial out = a;
    for (const auto& [w, c] : b.terms_) out.add_term(w, c);
    return out;
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    Polynomial out = a;
    for (const auto& [w, c] : b.terms_) out.add_term(w, -c);
    return out;
  }

  Polynomial operator-() const {
    Polynomial out;
    for (const auto& [w, c] : terms_) out.add_term(w, -c);
    return out;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) {
        std::vector<Letter> raw = wa.letters;
        raw.insert(raw.end(), wb.letters.begin(), wb.letters.end());
        out.add_term(normalize(raw), ca * cb);
      }
    return out;
  }

  friend Polynomial operator*(const S& s, const Polynomial& p) {
    Polynomial out;
    for (const auto& [w, c] : p.terms_) out.add_term(w, s * c);
    return out;
  }

  friend Polynomial operator*(const Polynomial& p, const S& s) { return s * p; }

  bool operator==(const Polynomial&) const = default;

 private:
  TermMap terms_;
};

}  // namespace freecorr
