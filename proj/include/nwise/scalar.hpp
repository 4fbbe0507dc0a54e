#ifndef NWISE_SCALAR_HPP
#define NWISE_SCALAR_HPP

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>

namespace nwise {

using Rational = mpq_class;
using BigInt = mpz_class;

// The two arithmetic modes: double (default) and exact rationals (oracle mode).
template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar Real>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double tolerance() { return 1e-12; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational tolerance() { return Rational(0); }
};

/// Largest denominator accepted when converting a double to an exact rational.
inline constexpr std::int64_t kMaxExactDenominator = 1'000'000;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& x) { return abs(x); }

template <Scalar Real>
Real from_integer(const BigInt& v) {
  if constexpr (std::same_as<Real, double>) {
    return v.get_d();
  } else {
    return Rational(v);
  }
}

/// Equality in the mode's sense: exact for rationals, and for doubles within
/// the tolerance measured against the unit total mass.
template <Scalar Real>
bool approx_equal(const Real& x, const Real& y) {
  if constexpr (ScalarTraits<Real>::exact) {
    return x == y;
  } else {
    const double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
    return std::fabs(x - y) <= ScalarTraits<double>::tolerance() * scale;
  }
}

/// Converts a double that denotes a short decimal (e.g. 0.1) to the exact
/// fraction it rounds from. Returns false when no fraction with denominator
/// <= kMaxExactDenominator rounds to exactly this double.
bool exact_rational(double x, Rational& out);

}  // namespace nwise

#endif  // NWISE_SCALAR_HPP
