#ifndef NWISE_FORMAT_HPP
#define NWISE_FORMAT_HPP

#include <string>

#include "nwise/scalar.hpp"

namespace nwise {

/// Scientific notation in the style of the published tables: `digits`
/// significant digits, lowercase e, signed exponent of at least two digits,
/// e.g. "5.6953e-01". Rounds half away from zero. Rationals are rounded
/// exactly; doubles are first taken to 15 significant digits, so a value
/// computed a few ulps off a decimal tie still rounds up.
std::string format_scientific(double value, int digits = 5);
std::string format_scientific(const Rational& value, int digits = 5);

}  // namespace nwise

#endif  // NWISE_FORMAT_HPP
