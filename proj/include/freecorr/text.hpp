#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "freecorr/bitstream.hpp"
#include "freecorr/cesaro.hpp"
#include "freecorr/koopman.hpp"
#include "freecorr/marginal_state.hpp"
#include "freecorr/scalar.hpp"
#include "freecorr/shift.hpp"
#include "freecorr/word.hpp"

namespace freecorr {

class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t position, std::string token)
      : std::runtime_error(what + " at position " + std::to_string(position) +
                           (token.empty() ? "" : " near '" + token + "'")),
        position_(position),
        token_(std::move(token)) {}

  std::size_t position() const { return position_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t position_;
  std::string token_;
};

namespace detail {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  std::size_t pos() const { return pos_; }

  bool consume(char c) {
    skip_ws();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  void expect(char c, const char* what) {
    if (!consume(c)) fail(std::string("expected ") + what);
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t end = pos_;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end]))) ++end;
    throw parse_error(what, pos_, std::string(text_.substr(pos_, end - pos_)));
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-'))
      ++pos_;
    if (pos_ == start) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::int64_t integer() {
    skip_ws();
    const std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::int64_t value = 0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc{} || res.ptr != text_.data() + pos_ || pos_ == start) {
      pos_ = start;
      fail("expected an integer");
    }
    return value;
  }

  double real() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != ',' && text_[pos_] != ':' && text_[pos_] != ')')
      ++pos_;
    double value = 0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc{} || res.ptr != text_.data() + pos_ || pos_ == start) {
      pos_ = start;
      fail("expected a number");
    }
    return value;
  }

  std::string_view rest() const { return text_.substr(pos_); }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline ObservableSymbol parse_symbol(Cursor& c) {
  c.skip_ws();
  if (!std::isalnum(static_cast<unsigned char>(c.peek()))) c.fail("expected a symbol");
  std::string name;
  while (std::isalnum(static_cast<unsigned char>(c.peek()))) {
    name.push_back(c.peek());
    c.advance(1);
  }
  const bool adjoint = c.consume('*');
  if (name == "1") {
    if (adjoint) c.fail("identity takes no adjoint mark");
    return ObservableSymbol::identity();
  }
  return ObservableSymbol::named(name, adjoint);
}

}  // namespace detail

// "A C" or "A* B 1"; symbols are alphanumeric names with optional trailing *.
inline SymbolMonomial parse_monomial(std::string_view text) {
  detail::Cursor c(text);
  SymbolMonomial m;
  while (!c.done()) m.push_back(detail::parse_symbol(c));
  if (m.empty()) c.fail("expected a monomial");
  return m;
}

// Letters look like A_1 or (A C)_2; the bare word "1" is the identity.
inline std::vector<Letter> parse_letters(std::string_view text) {
  detail::Cursor c(text);
  std::vector<Letter> out;
  c.skip_ws();
  if (c.peek() == '1') {
    detail::Cursor probe(c.rest());
    probe.advance(1);
    if (probe.done()) return out;
  }
  while (!c.done()) {
    SymbolMonomial factors;
    if (c.consume('(')) {
      while (!c.consume(')')) {
        if (c.done()) c.fail("expected ')'");
        factors.push_back(detail::parse_symbol(c));
      }
    } else {
      factors.push_back(detail::parse_symbol(c));
    }
    c.expect('_', "'_' before the copy index");
    const std::int64_t copy = c.integer();
    if (copy < 1) c.fail("copy index must be at least 1");
    out.push_back(Letter{static_cast<int>(copy), std::move(factors)});
  }
  return out;
}

inline Word parse_word(std::string_view text) { return normalize(parse_letters(text)); }

// "e(3) e(7) e(3)"; the empty word is written "1".
inline TimedWord parse_timed_word(std::string_view text) {
  detail::Cursor c(text);
  TimedWord w;
  c.skip_ws();
  if (c.peek() == '1') {
    c.advance(1);
    if (!c.done()) c.fail("unexpected trailing input after identity");
    return w;
  }
  while (!c.done()) {
    c.skip_ws();
    if (!c.consume('e')) c.fail("expected 'e('");
    c.expect('(', "'(' after e");
    const std::int64_t t = c.integer();
    if (t < 0) c.fail("times must be nonnegative");
    c.expect(')', "')' after the time");
    w.times.push_back(t);
  }
  return w;
}

// "121", "1,2,1", or a timed word whose times act as slot labels.
inline TimePattern parse_pattern(std::string_view text) {
  detail::Cursor c(text);
  c.skip_ws();
  if (c.done()) c.fail("expected a pattern");
  std::vector<int> copies;
  if (text.find("e(") != std::string_view::npos) {
    const TimedWord w = parse_timed_word(text);
    for (const auto t : w.times) {
      if (t < 1 || t > 1000000) c.fail("slot labels must be small positive integers");
      copies.push_back(static_cast<int>(t));
    }
  } else if (text.find(',') != std::string_view::npos) {
    for (;;) {
      const std::int64_t v = c.integer();
      if (v < 1 || v > 16) c.fail("slot labels must be in [1, 16]");
      copies.push_back(static_cast<int>(v));
      if (c.done()) break;
      c.expect(',', "','");
    }
  } else {
    while (!c.done()) {
      const char d = c.peek();
      if (!std::isdigit(static_cast<unsigned char>(d)) || d == '0')
        c.fail("expected a digit in [1, 9]");
      copies.push_back(d - '0');
      c.advance(1);
    }
  }
  if (copies.empty()) c.fail("expected a pattern");
  return TimePattern::from_copies(copies);
}

// constant:0, periodic:0110, thue-morse, bernoulli:0.5:seed=42, file:<path>.
inline BitStream parse_stream_spec(std::string_view text) {
  detail::Cursor c(text);
  c.skip_ws();
  const std::string kind = c.ident();
  if (kind == "thue-morse") {
    if (!c.done()) c.fail("unexpected trailing input");
    return BitStream::thue_morse();
  }
  if (kind == "constant") {
    c.expect(':', "':' after constant");
    const std::int64_t bit = c.integer();
    if (bit != 0 && bit != 1) c.fail("constant bit must be 0 or 1");
    if (!c.done()) c.fail("unexpected trailing input");
    return BitStream::constant(static_cast<int>(bit));
  }
  if (kind == "periodic") {
    c.expect(':', "':' after periodic");
    std::vector<std::uint8_t> bits;
    while (c.peek() == '0' || c.peek() == '1') {
      bits.push_back(static_cast<std::uint8_t>(c.peek() - '0'));
      c.advance(1);
    }
    if (bits.empty()) c.fail("expected a nonempty bit pattern");
    if (!c.done()) c.fail("unexpected trailing input");
    return BitStream::periodic(std::move(bits));
  }
  if (kind == "bernoulli") {
    c.expect(':', "':' after bernoulli");
    const double p = c.real();
    std::uint64_t seed = 0;
    if (c.consume(':')) {
      const std::string key = c.ident();
      if (key != "seed") c.fail("expected seed=<n>");
      c.expect('=', "'=' after seed");
      const std::int64_t s = c.integer();
      seed = static_cast<std::uint64_t>(s);
    }
    if (!c.done()) c.fail("unexpected trailing input");
    if (p < 0.0 || p > 1.0) c.fail("probability must lie in [0, 1]");
    return BitStream::bernoulli(p, seed);
  }
  if (kind == "file") {
    c.expect(':', "':' after file");
    c.skip_ws();
    const std::string path(c.rest());
    if (path.empty()) c.fail("expected a path");
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open bit file", c.pos(), path);
    std::vector<std::uint8_t> bits;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line != "0" && line != "1")
        throw parse_error("bit file lines must be 0 or 1", bits.size() + 1, line);
      bits.push_back(static_cast<std::uint8_t>(line[0] - '0'));
    }
    if (bits.empty()) throw parse_error("bit file is empty", 0, path);
    return BitStream::explicit_bits(std::move(bits), "file:" + path);
  }
  c.fail("unknown stream kind '" + kind + "'");
}

// Lines "A C = 0.7" or "A C = 0.7,0.1"; '#' starts a comment.
inline MarginalState<Complex>::Table parse_marginal_lines(std::istream& in) {
  MarginalState<Complex>::Table table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    detail::Cursor c(line);
    if (c.done()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw parse_error("expected '=' on line", lineno, line);
    const SymbolMonomial m = parse_monomial(std::string_view(line).substr(0, eq));
    detail::Cursor v(std::string_view(line).substr(eq + 1));
    const double re = v.real();
    double im = 0.0;
    if (v.consume(',')) im = v.real();
    if (!v.done()) v.fail("unexpected trailing input");
    if (table.count(m) != 0) throw parse_error("duplicate monomial", lineno, monomial_str(m));
    table.emplace(m, Complex(re, im));
  }
  return table;
}

inline MarginalState<Complex>::Table parse_marginal_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open marginals file", 0, path);
  return parse_marginal_lines(in);
}

// Lines "mode k = re,im"; k may be any integer, arbitrarily large.
inline FourierObservable parse_observable_lines(std::istream& in) {
  FourierObservable f;
  std::string line;
  std::size_t lineno = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    detail::Cursor c(line);
    if (c.done()) continue;
    if (c.ident() != "mode") throw parse_error("expected 'mode'", lineno, line);
    c.skip_ws();
    std::string digits;
    if (c.peek() == '-') {
      digits.push_back('-');
      c.advance(1);
    }
    while (std::isdigit(static_cast<unsigned char>(c.peek()))) {
      digits.push_back(c.peek());
      c.advance(1);
    }
    if (digits.empty() || digits == "-") throw parse_error("expected a mode index", lineno, line);
    c.expect('=', "'=' after the mode index");
    const double re = c.real();
    double im = 0.0;
    if (c.consume(',')) im = c.real();
    if (!c.done()) c.fail("unexpected trailing input");
    f.set_mode(BigInt(digits), Complex(re, im));
    any = true;
  }
  if (!any) throw parse_error("observable file defines no modes", 0, "");
  return f;
}

inline FourierObservable parse_observable_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open observable file", 0, path);
  return parse_observable_lines(in);
}

}  // namespace freecorr
