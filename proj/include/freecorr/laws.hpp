#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "freecorr/marginal_state.hpp"
#include "freecorr/polynomial.hpp"
#include "freecorr/scalar.hpp"
#include "freecorr/word.hpp"

namespace freecorr {

// Tensor law: copies are classically independent, so the word factorizes
// into one ordered monomial per copy.
template <class S>
S tensor_moment(const Word& w, const MarginalState<S>& state) {
  std::vector<std::pair<int, SymbolMonomial>> groups;
  for (const auto& l : w.letters) {
    const auto it = std::find_if(groups.begin(), groups.end(),
                                 [&](const auto& g) { return g.first == l.copy_index; });
    if (it == groups.end())
      groups.emplace_back(l.copy_index, l.factors);
    else
      it->second.insert(it->second.end(), l.factors.begin(), l.factors.end());
  }
  S out(1);
  for (const auto& [copy, m] : groups) out = out * state(m);
  return out;
}

// Koopman law: the product formula holds letter by letter on the normal
// form, merged letters contributing their full monomial moment.
template <class S>
S koopman_moment(const Word& w, const MarginalState<S>& state) {
  S out(1);
  for (const auto& l : w.letters) out = out * state.letter_moment(l);
  return out;
}

namespace detail {

// Free law via centering: w = prod X_i with X_i = <X_i>.1 + ~X_i expands
// over scalar subsets S; the all-centered term is alternating and vanishes
// by freeness, every other term recurses on strictly shorter words.
template <class S>
S free_moment_memo(const Word& w, const MarginalState<S>& state, std::map<Word, S>& memo) {
  if (w.empty()) return S(1);
  if (w.size() == 1) return state.letter_moment(w.letters[0]);
  if (const auto it = memo.find(w); it != memo.end()) return it->second;
  const int n = static_cast<int>(w.size());
  if (n > 20) throw std::range_error("free law evaluation limited to 20 letters");

  std::vector<S> means;
  means.reserve(static_cast<std::size_t>(n));
  for (const auto& l : w.letters) means.push_back(state.letter_moment(l));

  S total(0);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    S coeff(1);
    Polynomial<S> rest = Polynomial<S>::identity();
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1u) {
        coeff = coeff * means[static_cast<std::size_t>(i)];
      } else {
        Polynomial<S> centered =
            Polynomial<S>::from_word(Word{{w.letters[static_cast<std::size_t>(i)]}});
        centered.add_term(Word{}, -means[static_cast<std::size_t>(i)]);
        rest = rest * centered;
      }
    }
    S inner(0);
    for (const auto& [sub, c] : rest.terms()) inner = inner + c * free_moment_memo(sub, state, memo);
    total = total + coeff * inner;
  }
  memo.emplace(w, total);
  return total;
}

}  // namespace detail

template <class S>
S free_moment(const Word& w, const MarginalState<S>& state) {
  std::map<Word, S> memo;
  return detail::free_moment_memo(w, state, memo);
}

template <class S>
S tensor_moment(const Polynomial<S>& p, const MarginalState<S>& state) {
  S out(0);
  for (const auto& [w, c] : p.terms()) out = out + c * tensor_moment(w, state);
  return out;
}

template <class S>
S koopman_moment(const Polynomial<S>& p, const MarginalState<S>& state) {
  S out(0);
  for (const auto& [w, c] : p.terms()) out = out + c * koopman_moment(w, state);
  return out;
}

template <class S>
S free_moment(const Polynomial<S>& p, const MarginalState<S>& state) {
  std::map<Word, S> memo;
  S out(0);
  for (const auto& [w, c] : p.terms())
    out = out + c * detail::free_moment_memo(w, state, memo);
  return out;
}

// kappa_1..kappa_n from m_1..m_n through the moment-cumulant recursion
// m_n = sum_s kappa_s sum_{i_1+..+i_s = n-s} m_{i_1} ... m_{i_s}.
template <class S>
std::vector<S> free_cumulants(std::span<const S> moments) {
  const int n = static_cast<int>(moments.size());
  if (n > 16) throw std::invalid_argument("free cumulants supported up to order 16");
  std::vector<S> m(static_cast<std::size_t>(n) + 1, S(0));
  m[0] = S(1);
  for (int i = 1; i <= n; ++i) m[static_cast<std::size_t>(i)] = moments[static_cast<std::size_t>(i - 1)];

  // conv[s][r] = sum over s-part compositions of r (parts >= 0) of prod m
  std::vector<std::vector<S>> conv(static_cast<std::size_t>(n) + 1,
                                   std::vector<S>(static_cast<std::size_t>(n) + 1, S(0)));
  for (int r = 0; r <= n; ++r) conv[1][static_cast<std::size_t>(r)] = m[static_cast<std::size_t>(r)];
  for (int s = 2; s <= n; ++s)
    for (int r = 0; r <= n; ++r) {
      S acc(0);
      for (int i = 0; i <= r; ++i)
        acc = acc + m[static_cast<std::size_t>(i)] *
                        conv[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(r - i)];
      conv[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)] = acc;
    }

  std::vector<S> kappa(static_cast<std::size_t>(n) + 1, S(0));
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int order = 1; order <= n; ++order) {
    S rhs(0);
    for (int s = 1; s < order; ++s)
      rhs = rhs + kappa[static_cast<std::size_t>(s)] *
                      conv[static_cast<std::size_t>(s)][static_cast<std::size_t>(order - s)];
    kappa[static_cast<std::size_t>(order)] = m[static_cast<std::size_t>(order)] - rhs;
    out.push_back(kappa[static_cast<std::size_t>(order)]);
  }
  return out;
}

template <class S>
std::vector<S> free_cumulants(const std::vector<S>& moments) {
  return free_cumulants(std::span<const S>(moments.data(), moments.size()));
}

enum class LawKind { tensor, free, koopman };

template <class S>
S law_moment(LawKind law, const Word& w, const MarginalState<S>& state) {
  switch (law) {
    case LawKind::tensor:
      return tensor_moment(w, state);
    case LawKind::free:
      return free_moment(w, state);
    case LawKind::koopman:
      return koopman_moment(w, state);
  }
  throw std::logic_error("unhandled law kind");
}

template <class S>
S law_moment(LawKind law, const Polynomial<S>& p, const MarginalState<S>& state) {
  switch (law) {
    case LawKind::tensor:
      return tensor_moment(p, state);
    case LawKind::free:
      return free_moment(p, state);
    case LawKind::koopman:
      return koopman_moment(p, state);
  }
  throw std::logic_error("unhandled law kind");
}

}  // namespace freecorr
