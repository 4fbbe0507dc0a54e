#include "nwise/format.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace nwise {
namespace {

constexpr int kCarriedDigits = 15;

// Assembles "d.ddde±xx" from a string of significant digits.
std::string assemble(bool negative, const std::string& digits, long exponent) {
  std::string out;
  if (negative) out += '-';
  out += digits[0];
  if (digits.size() > 1) {
    out += '.';
    out.append(digits, 1, std::string::npos);
  }
  char exp_buf[32];
  std::snprintf(exp_buf, sizeof exp_buf, "e%c%02ld", exponent < 0 ? '-' : '+',
                exponent < 0 ? -exponent : exponent);
  return out + exp_buf;
}

std::string zero(int digits) { return assemble(false, std::string(static_cast<std::size_t>(digits), '0'), 0); }

// Rounds a digit string (at least `digits` + 1 long) half-up to `digits`
// digits; returns true when the rounding carried into a new leading digit.
bool round_half_up(std::string& all, int digits) {
  const bool up = all[static_cast<std::size_t>(digits)] >= '5';
  all.resize(static_cast<std::size_t>(digits));
  if (!up) return false;
  for (std::size_t i = all.size(); i-- > 0;) {
    if (all[i] == '9') {
      all[i] = '0';
    } else {
      ++all[i];
      return false;
    }
  }
  all.insert(all.begin(), '1');
  all.pop_back();
  return true;
}

}  // namespace

std::string format_scientific(double value, int digits) {
  if (digits < 1) throw std::invalid_argument("digits must be positive");
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  if (value == 0) return zero(digits);
  // Below 15 digits, round first to the 15 significant digits a double
  // carries so that computed decimal ties (0.0526095 landing a few ulps
  // low) round up as the decimal would. Otherwise use the exact binary
  // value; glibc prints it in full and 800 digits cover every double.
  std::vector<char> buf(1024);
  if (digits < kCarriedDigits) {
    std::snprintf(buf.data(), buf.size(), "%.*e", kCarriedDigits - 1, std::fabs(value));
  } else {
    std::snprintf(buf.data(), buf.size(), "%.800e", std::fabs(value));
  }
  const std::string text(buf.data());
  const auto e_pos = text.find('e');
  std::string all;
  all += text[0];
  all.append(text, 2, e_pos - 2);
  long exponent = std::stol(text.substr(e_pos + 1));
  if (round_half_up(all, digits)) ++exponent;
  return assemble(value < 0, all, exponent);
}

std::string format_scientific(const Rational& value, int digits) {
  if (digits < 1) throw std::invalid_argument("digits must be positive");
  if (value == 0) return zero(digits);
  const bool negative = value < 0;
  const Rational magnitude = abs(value);
  // Find exponent e with 10^e <= magnitude < 10^(e+1).
  // Digit counts give the exponent to within one or two; the loops below
  // settle it. get_d() would overflow for huge values.
  long exponent = static_cast<long>(mpz_sizeinbase(magnitude.get_num_mpz_t(), 10)) -
                  static_cast<long>(mpz_sizeinbase(magnitude.get_den_mpz_t(), 10));
  auto pow10 = [](long e) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
    return e < 0 ? Rational(BigInt(1), p) : Rational(p);
  };
  while (magnitude >= pow10(exponent + 1)) ++exponent;
  while (magnitude < pow10(exponent)) --exponent;
  // digits + 1 significant digits, truncated, then half-up on the last.
  Rational scaled = magnitude / pow10(exponent - digits);
  BigInt truncated = scaled.get_num() / scaled.get_den();
  std::string all = truncated.get_str();
  if (round_half_up(all, digits)) ++exponent;
  return assemble(negative, all, exponent);
}

}  // namespace nwise
