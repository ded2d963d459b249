#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "freecorr/polynomial.hpp"
#include "freecorr/scalar.hpp"
#include "freecorr/symbolic.hpp"
#include "freecorr/word.hpp"

namespace freecorr {

class missing_moment_error : public std::runtime_error {
 public:
  explicit missing_moment_error(const SymbolMonomial& m)
      : std::runtime_error("marginal state does not define <" + monomial_str(m) + ">"),
        monomial_(monomial_str(m)) {}

  const std::string& monomial() const { return monomial_; }

 private:
  std::string monomial_;
};

// The single-copy reference state: ordered monomials -> scalars. Identity
// factors are stripped before lookup and the empty monomial is pinned to 1,
// so <1> = 1 holds by construction.
template <class S>
class MarginalState {
 public:
  using Oracle = std::function<S(const SymbolMonomial&)>;
  using Table = std::map<SymbolMonomial, S>;

  static MarginalState from_table(Table table) {
    auto shared = std::make_shared<const Table>(std::move(table));
    MarginalState st;
    st.oracle_ = [shared](const SymbolMonomial& m) -> S {
      auto it = shared->find(m);
      if (it == shared->end()) throw missing_moment_error(m);
      return it->second;
    };
    return st;
  }

  static MarginalState from_function(Oracle f) {
    MarginalState st;
    st.oracle_ = std::move(f);
    return st;
  }

  S operator()(const SymbolMonomial& raw) const {
    SymbolMonomial m;
    m.reserve(raw.size());
    for (const auto& s : raw)
      if (!s.is_identity) m.push_back(s);
    if (m.empty()) return S(1);
    return oracle_(m);
  }

  S letter_moment(const Letter& l) const { return (*this)(l.factors); }

 private:
  Oracle oracle_;
};

// Formal state: every monomial evaluates to its own moment symbol.
inline MarginalState<SymbolicExpr> formal_state() {
  return MarginalState<SymbolicExpr>::from_function(
      [](const SymbolMonomial& m) { return SymbolicExpr::atom(m); });
}

namespace detail {

inline bool nonnegative_real(double v) { return v >= -1e-12; }
inline bool nonnegative_real(const Rational& v) { return v >= 0; }
inline bool nonnegative_real(const Complex& v) {
  return std::abs(v.imag()) <= 1e-12 && v.real() >= -1e-12;
}

}  // namespace detail

// Spot check: for every table key M whose square <M* M> is also tabulated,
// that value must be a nonnegative real. Throws std::domain_error otherwise.
template <class S>
void check_positivity(const typename MarginalState<S>::Table& table) {
  for (const auto& [m, unused] : table) {
    (void)unused;
    SymbolMonomial sq = monomial_adjoint(m);
    sq.insert(sq.end(), m.begin(), m.end());
    auto it = table.find(sq);
    if (it != table.end() && !detail::nonnegative_real(it->second))
      throw std::domain_error("state fails positivity at <" + monomial_str(sq) + ">");
  }
}

// A - <A>.1, instantiated at a copy index on use.
template <class S>
struct CenteredObservable {
  ObservableSymbol symbol;
  S mean;

  Polynomial<S> at(int copy_index) const {
    Polynomial<S> p = Polynomial<S>::from_letter(letter(copy_index, symbol));
    p.add_term(Word{}, -mean);
    return p;
  }
};

template <class S>
CenteredObservable<S> center(const ObservableSymbol& symbol, const MarginalState<S>& state) {
  return {symbol, state(SymbolMonomial{symbol})};
}

}  // namespace freecorr
