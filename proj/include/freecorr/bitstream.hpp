#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace freecorr {

namespace detail {

// splitmix64 finalizer; stateless, so bits are random-access.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

// The commutation-bit sequence a(1), a(2), ... Every kind is deterministic
// given its parameters; bernoulli hashes (seed, t) so that bit(t) never
// depends on evaluation order.
class BitStream {
 public:
  enum class Kind { Constant, Periodic, ThueMorse, Bernoulli, Explicit };

  static BitStream constant(int b) {
    if (b != 0 && b != 1) throw std::invalid_argument("constant stream bit must be 0 or 1");
    BitStream s;
    s.kind_ = Kind::Constant;
    s.constant_ = b;
    s.spec_ = "constant:" + std::to_string(b);
    return s;
  }

  static BitStream periodic(std::vector<std::uint8_t> pattern) {
    if (pattern.empty()) throw std::invalid_argument("periodic stream needs a nonempty pattern");
    BitStream s;
    s.kind_ = Kind::Periodic;
    s.bits_ = std::move(pattern);
    s.spec_ = "periodic:";
    for (auto b : s.bits_) {
      if (b > 1) throw std::invalid_argument("periodic pattern must be 0/1");
      s.spec_ += static_cast<char>('0' + b);
    }
    return s;
  }

  static BitStream thue_morse() {
    BitStream s;
    s.kind_ = Kind::ThueMorse;
    s.spec_ = "thue-morse";
    return s;
  }

  static BitStream bernoulli(double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli p must lie in [0, 1]");
    BitStream s;
    s.kind_ = Kind::Bernoulli;
    s.p_ = p;
    s.seed_ = detail::mix64(seed);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    s.spec_ = std::string("bernoulli:") + buf + ":seed=" + std::to_string(seed);
    return s;
  }

  static BitStream explicit_bits(std::vector<std::uint8_t> bits, std::string spec = "") {
    BitStream s;
    s.kind_ = Kind::Explicit;
    s.bits_ = std::move(bits);
    if (spec.empty()) {
      spec = "explicit:";
      for (auto b : s.bits_) spec += static_cast<char>('0' + (b & 1));
    }
    s.spec_ = std::move(spec);
    return s;
  }

  int bit(std::int64_t t) const {
    if (t <= 0) throw std::domain_error("bit-stream lag must be >= 1");
    switch (kind_) {
      case Kind::Constant:
        return constant_;
      case Kind::Periodic:
        return bits_[static_cast<std::size_t>((t - 1) % static_cast<std::int64_t>(bits_.size()))];
      case Kind::ThueMorse:
        return static_cast<int>(std::popcount(static_cast<std::uint64_t>(t)) & 1u);
      case Kind::Bernoulli: {
        const std::uint64_t h = detail::mix64(seed_ ^ static_cast<std::uint64_t>(t));
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        return u < p_ ? 1 : 0;
      }
      case Kind::Explicit:
        if (static_cast<std::uint64_t>(t) > bits_.size())
          throw std::out_of_range("explicit stream has no bit at lag " + std::to_string(t));
        return bits_[static_cast<std::size_t>(t - 1)];
    }
    throw std::logic_error("unreachable");
  }

  double empirical_mean(std::int64_t T) const {
    if (T < 1) throw std::invalid_argument("empirical mean needs T >= 1");
    std::int64_t sum = 0;
    for (std::int64_t t = 1; t <= T; ++t) sum += bit(t);
    return static_cast<double>(sum) / static_cast<double>(T);
  }

  Kind kind() const { return kind_; }
  const std::string& spec() const { return spec_; }

 private:
  Kind kind_ = Kind::Constant;
  int constant_ = 0;
  double p_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint8_t> bits_;
  std::string spec_;
};

}  // namespace freecorr
