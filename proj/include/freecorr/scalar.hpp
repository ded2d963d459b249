#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdio>
#include <string>

namespace freecorr {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

// Customization points every polynomial/law scalar must satisfy, in addition
// to S(int), unary minus, +, -, * and ==.
inline double conjugate(double x) { return x; }
inline Complex conjugate(const Complex& z) { return std::conj(z); }
inline Rational conjugate(const Rational& r) { return r; }

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Complex& z) { return z.real() == 0.0 && z.imag() == 0.0; }
inline bool is_zero(const Rational& r) { return r == 0; }

inline double to_double(double x) { return x; }
inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Fixed formatting so emitted tables are byte-stable across runs.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace freecorr
