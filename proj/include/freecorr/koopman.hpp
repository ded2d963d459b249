#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "freecorr/cesaro.hpp"
#include "freecorr/laws.hpp"
#include "freecorr/marginal_state.hpp"
#include "freecorr/polynomial.hpp"
#include "freecorr/scalar.hpp"
#include "freecorr/word.hpp"

namespace freecorr {

// Trigonometric polynomial on the circle, stored as sparse Fourier modes.
// The doubling map x -> 2x mod 1 acts exactly: mode k moves to 2^t k, so all
// mixing statements below are integer arithmetic, not numerics.
class FourierObservable {
 public:
  using ModeMap = std::map<BigInt, Complex>;

  FourierObservable() = default;

  static FourierObservable constant(Complex c) {
    FourierObservable f;
    f.set_mode(BigInt(0), c);
    return f;
  }

  void set_mode(BigInt k, Complex c) {
    if (is_zero(c))
      modes_.erase(k);
    else
      modes_[std::move(k)] = c;
  }

  void add_scaled(const FourierObservable& f, Complex amp) {
    if (is_zero(amp)) return;
    for (const auto& [k, c] : f.modes_) {
      auto it = modes_.find(k);
      if (it == modes_.end()) {
        modes_.emplace(k, amp * c);
      } else {
        it->second += amp * c;
        if (is_zero(it->second)) modes_.erase(it);
      }
    }
  }

  Complex mode(const BigInt& k) const {
    const auto it = modes_.find(k);
    return it == modes_.end() ? Complex{} : it->second;
  }

  Complex c0() const { return mode(BigInt(0)); }
  const ModeMap& modes() const { return modes_; }
  bool empty() const { return modes_.empty(); }

  FourierObservable evolved(std::int64_t t) const {
    if (t < 0) throw std::invalid_argument("doubling map evolves forward only");
    const BigInt factor = BigInt(1) << static_cast<unsigned>(t);
    FourierObservable out;
    for (const auto& [k, c] : modes_) out.modes_.emplace(k * factor, c);
    return out;
  }

  // <f|g> under Lebesgue measure; conjugate linear in f.
  friend Complex inner(const FourierObservable& f, const FourierObservable& g) {
    const auto& small = f.modes_.size() <= g.modes_.size() ? f.modes_ : g.modes_;
    const auto& large = f.modes_.size() <= g.modes_.size() ? g.modes_ : f.modes_;
    const bool small_is_f = f.modes_.size() <= g.modes_.size();
    Complex out{};
    for (const auto& [k, c] : small) {
      const auto it = large.find(k);
      if (it == large.end()) continue;
      out += small_is_f ? std::conj(c) * it->second : std::conj(it->second) * c;
    }
    return out;
  }

 private:
  ModeMap modes_;
};

// |ket><bra|; expectation in the Koopman vacuum is c0(ket) conj(c0(bra)).
struct RankOneOperator {
  FourierObservable ket;
  FourierObservable bra;

  Complex expectation() const { return ket.c0() * std::conj(bra.c0()); }
};

// lambda.1 + sum coeff |ket><bra|. The identity is not finite rank, so its
// coefficient is carried separately; centering only touches that scalar.
class FiniteRankOperator {
 public:
  FiniteRankOperator() = default;

  static FiniteRankOperator identity(Complex lambda = Complex(1)) {
    FiniteRankOperator op;
    op.identity_ = lambda;
    return op;
  }

  static FiniteRankOperator rank_one(FourierObservable ket, FourierObservable bra,
                                     Complex coeff = Complex(1)) {
    FiniteRankOperator op;
    op.add_term(coeff, {std::move(ket), std::move(bra)});
    return op;
  }

  void add_term(Complex coeff, RankOneOperator term) {
    if (is_zero(coeff)) return;
    terms_.emplace_back(coeff, std::move(term));
  }

  void add_identity(Complex lambda) { identity_ += lambda; }

  Complex identity_component() const { return identity_; }
  const std::vector<std::pair<Complex, RankOneOperator>>& terms() const { return terms_; }

  Complex expectation() const {
    Complex out = identity_;
    for (const auto& [c, term] : terms_) out += c * term.expectation();
    return out;
  }

  FiniteRankOperator centered() const {
    FiniteRankOperator out = *this;
    out.identity_ -= expectation();
    return out;
  }

  FiniteRankOperator finite_part() const {
    FiniteRankOperator out = *this;
    out.identity_ = Complex{};
    return out;
  }

  FiniteRankOperator adjoint() const {
    FiniteRankOperator out;
    out.identity_ = std::conj(identity_);
    for (const auto& [c, term] : terms_)
      out.add_term(std::conj(c), RankOneOperator{term.bra, term.ket});
    return out;
  }

  // (U^t O U^-t) v, evolving kets and bras to time t on the fly.
  FourierObservable apply(const FourierObservable& v, std::int64_t t) const {
    FourierObservable out;
    out.add_scaled(v, identity_);
    for (const auto& [c, term] : terms_) {
      const Complex amp = c * inner(term.bra.evolved(t), v);
      out.add_scaled(term.ket.evolved(t), amp);
    }
    return out;
  }

  // |f><g| |u><v| = <g|u> |f><v|, distributed over sums and identities.
  friend FiniteRankOperator operator*(const FiniteRankOperator& x, const FiniteRankOperator& y) {
    FiniteRankOperator out;
    out.identity_ = x.identity_ * y.identity_;
    for (const auto& [c, term] : y.terms_) out.add_term(x.identity_ * c, term);
    for (const auto& [c, term] : x.terms_) out.add_term(c * y.identity_, term);
    for (const auto& [cx, tx] : x.terms_)
      for (const auto& [cy, ty] : y.terms_)
        out.add_term(cx * cy * inner(tx.bra, ty.ket), RankOneOperator{tx.ket, ty.bra});
    return out;
  }

 private:
  Complex identity_{};
  std::vector<std::pair<Complex, RankOneOperator>> terms_;
};

// <1| O_1(t_1) ... O_n(t_n) |1>, contracted right to left through the chain
// of evolved inner products.
inline Complex multi_correlation(
    std::span<const std::pair<FiniteRankOperator, std::int64_t>> timed) {
  FourierObservable v = FourierObservable::constant(Complex(1));
  for (auto it = timed.rbegin(); it != timed.rend(); ++it) v = it->first.apply(v, it->second);
  return v.c0();
}

inline Complex multi_correlation(
    const std::vector<std::pair<FiniteRankOperator, std::int64_t>>& timed) {
  return multi_correlation(
      std::span<const std::pair<FiniteRankOperator, std::int64_t>>(timed.data(), timed.size()));
}

// Smallest gap g such that every cross-time inner product between vectors of
// these operators factorizes into c0 products once |t - s| >= g: evolving by
// g pushes the smallest nonzero mode past the largest one.
inline std::int64_t mode_cutoff(std::span<const FiniteRankOperator> ops) {
  BigInt max_abs = 0;
  std::optional<BigInt> min_abs;
  const auto scan = [&](const FourierObservable& f) {
    for (const auto& [k, c] : f.modes()) {
      (void)c;
      if (k == 0) continue;
      const BigInt a = abs(k);
      if (a > max_abs) max_abs = a;
      if (!min_abs || a < *min_abs) min_abs = a;
    }
  };
  for (const auto& op : ops)
    for (const auto& [c, term] : op.terms()) {
      (void)c;
      scan(term.ket);
      scan(term.bra);
    }
  if (!min_abs) return 0;
  std::int64_t g = 0;
  BigInt lhs = *min_abs;
  while (lhs <= max_abs) {
    lhs <<= 1;
    ++g;
  }
  return g;
}

struct KoopmanCheckRow {
  std::vector<std::int64_t> horizons;
  Complex estimate;
  double abs_error = 0.0;
};

struct KoopmanCheckResult {
  Complex prediction;
  std::int64_t min_gap = 1;
  std::vector<KoopmanCheckRow> rows;
};

// Cesaro averages of multi_correlation over the pattern's time grid against
// the predicted asymptotic value. ops[i] belongs to pattern position i and is
// expected to be centered when reproducing the centered-word fixtures.
//
// The letter-product law applies to identity-free operators only: an identity
// component lets two same-copy letters contract past the positions between
// them. So each operator is split into identity part plus finite part, the
// word is expanded into identity-free words, and the law is applied per word
// under the state that multiplies finite parts out as operators.
//
// Grid points closer than min_gap (default: the operators' mode cutoff) are
// excluded, which keeps each retained point exactly on the asymptotic value.
inline KoopmanCheckResult asymptotic_check(const TimePattern& pattern,
                                           const std::vector<FiniteRankOperator>& ops,
                                           const AveragingSchedule& schedule,
                                           std::optional<std::int64_t> min_gap = std::nullopt) {
  if (ops.size() != pattern.slots.size())
    throw std::invalid_argument("need exactly one operator per pattern position");
  if (ops.empty()) throw std::invalid_argument("pattern must not be empty");

  Polynomial<Complex> expanded = Polynomial<Complex>::identity();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    Polynomial<Complex> factor = Polynomial<Complex>::from_letter(
        letter(pattern.slots[i], ObservableSymbol::named("P" + std::to_string(i + 1))));
    factor.add_term(Word{}, ops[i].identity_component());
    expanded = expanded * factor;
  }

  const auto state = MarginalState<Complex>::from_function([&ops](const SymbolMonomial& m) {
    FiniteRankOperator prod = FiniteRankOperator::identity(Complex(1));
    for (const auto& s : m) {
      const std::size_t idx = static_cast<std::size_t>(std::stoul(s.name.substr(1))) - 1;
      prod = prod * ops.at(idx).finite_part();
    }
    return prod.expectation();
  });

  KoopmanCheckResult result;
  result.prediction = koopman_moment(expanded, state);
  result.min_gap =
      min_gap ? std::max<std::int64_t>(*min_gap, 0)
              : std::max<std::int64_t>(std::int64_t{1},
                                       mode_cutoff(std::span<const FiniteRankOperator>(
                                           ops.data(), ops.size())));

  const auto evaluator = [&](std::span<const std::int64_t> times) {
    FourierObservable v = FourierObservable::constant(Complex(1));
    for (std::size_t i = ops.size(); i-- > 0;)
      v = ops[i].apply(v, times[static_cast<std::size_t>(pattern.slots[i] - 1)]);
    return v.c0();
  };

  for (const auto& rung : schedule.rungs) {
    const auto res = average(pattern, evaluator,
                             std::span<const std::int64_t>(rung.data(), rung.size()),
                             result.min_gap);
    KoopmanCheckRow row;
    row.horizons = rung;
    row.estimate = res.mean;
    row.abs_error = std::abs(res.mean - result.prediction);
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace freecorr
