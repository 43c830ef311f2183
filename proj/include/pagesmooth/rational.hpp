#pragma once

#include <gmpxx.h>

#include <string>

namespace pagesmooth {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational harmonic(int k) {
  Rational h(0);
  for (int j = 1; j <= k; ++j) h += Rational(1, j);
  return h;
}

inline Rational rpow(const Rational& base, unsigned e) {
  Rational out(1);
  for (unsigned j = 0; j < e; ++j) out *= base;
  return out;
}

inline std::string to_fraction(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_str();
}

inline double to_double(const Rational& r) { return r.get_d(); }

// Exact parse of "p/q" or an integer.
inline Rational parse_rational(const std::string& s) {
  Rational r(s);
  r.canonicalize();
  return r;
}

}  // namespace pagesmooth
