#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "freecorr/scalar.hpp"
#include "freecorr/word.hpp"

namespace freecorr {

// Commutative polynomial in formal moment symbols <M> with exact rational
// coefficients. Each term is a sorted multiset of atoms, so equal expressions
// compare equal structurally.
class SymbolicExpr {
 public:
  using Atom = SymbolMonomial;
  using Product = std::vector<Atom>;

  // Terms print shortest product first, so centered corrections come last.
  struct ProductLess {
    bool operator()(const Product& a, const Product& b) const {
      if (a.size() != b.size()) return a.size() < b.size();
      return a < b;
    }
  };

  using TermMap = std::map<Product, Rational, ProductLess>;

  SymbolicExpr() = default;
  SymbolicExpr(int v) {
    if (v != 0) terms_[{}] = v;
  }
  explicit SymbolicExpr(Rational v) {
    if (v != 0) terms_[{}] = std::move(v);
  }

  static SymbolicExpr atom(SymbolMonomial m) {
    SymbolicExpr e;
    e.terms_[Product{std::move(m)}] = 1;
    return e;
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero_expr() const { return terms_.empty(); }

  friend SymbolicExpr operator+(const SymbolicExpr& a, const SymbolicExpr& b) {
    SymbolicExpr out = a;
    for (const auto& [p, c] : b.terms_) out.add(p, c);
    return out;
  }

  friend SymbolicExpr operator-(const SymbolicExpr& a, const SymbolicExpr& b) {
    SymbolicExpr out = a;
    for (const auto& [p, c] : b.terms_) out.add(p, -c);
    return out;
  }

  SymbolicExpr operator-() const {
    SymbolicExpr out;
    for (const auto& [p, c] : terms_) out.terms_[p] = -c;
    return out;
  }

  friend SymbolicExpr operator*(const SymbolicExpr& a, const SymbolicExpr& b) {
    SymbolicExpr out;
    for (const auto& [pa, ca] : a.terms_)
      for (const auto& [pb, cb] : b.terms_) {
        Product p;
        p.reserve(pa.size() + pb.size());
        std::merge(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(p));
        out.add(std::move(p), ca * cb);
      }
    return out;
  }

  bool operator==(const SymbolicExpr&) const = default;

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [prod, coeff] : terms_) {
      Rational c = coeff;
      const bool neg = c < 0;
      if (neg) c = -c;
      if (out.empty()) {
        if (neg) out += "-";
      } else {
        out += neg ? " - " : " + ";
      }
      std::string atoms;
      for (const auto& a : prod) {
        if (!atoms.empty()) atoms += ' ';
        atoms += "<" + monomial_str(a) + ">";
      }
      if (c == 1 && !atoms.empty()) {
        out += atoms;
      } else {
        out += c.str();
        if (!atoms.empty()) out += " " + atoms;
      }
    }
    return out;
  }

 private:
  void add(Product p, Rational c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(std::move(p), c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  TermMap terms_;
};

// Conjugation sends <M> to <M*> with M* read right to left; coefficients stay
// rational, hence real.
inline SymbolicExpr conjugate(const SymbolicExpr& e) {
  SymbolicExpr out;
  for (const auto& [prod, c] : e.terms()) {
    SymbolicExpr term{Rational(c)};
    for (const auto& a : prod) term = term * SymbolicExpr::atom(monomial_adjoint(a));
    out = out + term;
  }
  return out;
}

inline bool is_zero(const SymbolicExpr& e) { return e.is_zero_expr(); }

}  // namespace freecorr
