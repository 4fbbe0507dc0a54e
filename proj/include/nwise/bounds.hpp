#ifndef NWISE_BOUNDS_HPP
#define NWISE_BOUNDS_HPP

#include <cfloat>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nwise/error.hpp"
#include "nwise/marginals.hpp"
#include "nwise/measure_family.hpp"
#include "nwise/scalar.hpp"

namespace nwise {

/// C(z, j) for z >= 0, with C(z, j) = 0 when j < 0 or j > z.
inline BigInt binomial(long z, long j) {
  if (j < 0 || z < 0 || j > z) return BigInt(0);
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(z), static_cast<unsigned long>(j));
  return out;
}

/// Tail probabilities P0(n, t) = P(at least t of n independent events occur)
/// for t = 0..n, by the recursion
///   P0(r, t) = P0(r-1, t-1) a_r + P0(r-1, t) (1 - a_r),  P0(r, 0) = 1.
template <Scalar Real>
std::vector<Real> tail_probabilities(std::span<const Real> values) {
  const std::size_t n = values.size();
  std::vector<Real> tail(n + 1, Real(0));
  tail[0] = Real(1);
  for (std::size_t r = 1; r <= n; ++r) {
    const Real& a = values[r - 1];
    const Real complement = Real(1) - a;
    for (std::size_t t = r; t >= 1; --t) tail[t] = tail[t - 1] * a + tail[t] * complement;
  }
  return tail;
}

template <Scalar Real>
std::vector<Real> tail_probabilities(const BasicMarginalProfile<Real>& profile) {
  return tail_probabilities(profile.sorted_values());
}

/// P0(n, k, a); k = n + 1 (or larger) gives 0.
template <Scalar Real>
Real tail_probability_dp(const BasicMarginalProfile<Real>& profile, long k) {
  if (k < 0) throw ValidationError("k must be nonnegative, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > profile.size()) return Real(0);
  return tail_probabilities(profile)[static_cast<std::size_t>(k)];
}

/// CDF of a Poisson-binomial count: F(j) = P(Y <= j).
template <Scalar Real>
struct TailCdf {
  /// values[j] = F(j) for j = 0..N, N the number of trials; values[N] = 1.
  std::vector<Real> values;

  Real operator()(long j) const {
    if (j < 0) return Real(0);
    if (static_cast<std::size_t>(j) >= values.size()) return Real(1);
    return values[static_cast<std::size_t>(j)];
  }
};

template <Scalar Real>
TailCdf<Real> poisson_binomial_cdf(std::span<const Real> values) {
  for (const Real& v : values) {
    if (v < 0 || v > 1) throw ValidationError("Poisson-binomial probability outside [0,1]");
  }
  const std::vector<Real> tail = tail_probabilities(values);
  TailCdf<Real> cdf;
  cdf.values.resize(values.size() + 1);
  for (std::size_t j = 0; j < values.size(); ++j) cdf.values[j] = Real(1) - tail[j + 1];
  cdf.values[values.size()] = Real(1);
  return cdf;
}

template <Scalar Real>
struct BoundReport {
  long k = 0;
  Real exact_mutual;
  Real sharp_lower;
  Real sharp_upper;
  Real s_at_lower;
  Real s_at_upper;
  /// C(n-1, k-1), the slope of the tail probability in s (up to sign).
  BigInt coefficient;
  bool collapsed = false;
};

namespace detail {

inline void require_k(const std::size_t n, long k, long k_min) {
  if (k < k_min || k > static_cast<long>(n)) {
    throw ValidationError("k = " + std::to_string(k) + " out of range [" + std::to_string(k_min) +
                          ", " + std::to_string(n) + "]");
  }
}

// C * a^[len] for the endpoint products. In floating mode the product of
// many marginals underflows long before C * a^[len] becomes negligible, so
// large instances go through logarithms.
template <Scalar Real>
Real scaled_prefix_atom(const BasicMarginalProfile<Real>& profile, const BigInt& coefficient,
                        std::size_t len) {
  if constexpr (ScalarTraits<Real>::exact) {
    return Rational(coefficient) * prefix_atom(profile, len);
  } else {
    if (coefficient == 0 || prefix_atom_vanishes(profile, len)) return 0.0;
    const double direct = prefix_atom(profile, len);
    const double c = coefficient.get_d();
    if (direct > 1e-280 && std::isfinite(c) && c < 1e280) return c * direct;
    long exp2 = 0;
    const double mantissa = mpz_get_d_2exp(&exp2, coefficient.get_mpz_t());
    double log_total = std::log(mantissa) + static_cast<double>(exp2) * std::log(2.0);
    for (std::size_t i = 0; i < profile.size(); ++i) {
      log_total += i < len ? std::log(profile[i]) : std::log1p(-profile[i]);
    }
    return std::exp(log_total);
  }
}

// Bounds computed in floating point may overshoot [0,1] by rounding only.
template <Scalar Real>
Real settle_probability(Real value, const char* what) {
  if constexpr (!ScalarTraits<Real>::exact) {
    const double slack = ScalarTraits<double>::tolerance();
    if (value < 0 && value >= -slack) value = 0.0;
    if (value > 1 && value <= 1 + slack) value = 1.0;
  }
  if (value < 0 || value > 1) {
    throw std::logic_error(std::string(what) + " left [0,1]: " + detail::describe(value));
  }
  return value;
}

}  // namespace detail

/// P_s(n, k) = P0(n, k) + (-1)^k C(n-1, k-1) s for the family member s.
template <Scalar Real>
Real probability_at_s(const BasicMarginalProfile<Real>& profile, long k, const Real& s) {
  detail::require_k(profile.size(), k, 0);
  const SInterval<Real> interval = s_interval(profile);
  if (!interval.contains(s, ScalarTraits<Real>::tolerance())) {
    throw ValidationError("s = " + detail::describe(s) + " outside feasible interval [" +
                          detail::describe(interval.s_min) + ", " +
                          detail::describe(interval.s_max) + "]");
  }
  const Real slope = from_integer<Real>(binomial(static_cast<long>(profile.size()) - 1, k - 1));
  const Real shift = slope * s;
  const Real p0 = tail_probability_dp(profile, k);
  return k % 2 == 0 ? Real(p0 + shift) : Real(p0 - shift);
}

/// Sharp lower/upper bounds on P(at least k of n events) over all measures
/// making the events (n-1)-wise independent with the given marginals.
/// Odd k: lower at s = s_max, upper at s = s_min; even k: the reverse.
template <Scalar Real>
BoundReport<Real> sharp_bounds(const BasicMarginalProfile<Real>& profile, long k) {
  detail::require_k(profile.size(), k, 0);
  const SInterval<Real> interval = s_interval(profile);
  BoundReport<Real> report;
  report.k = k;
  report.collapsed = interval.collapsed;
  report.coefficient = binomial(static_cast<long>(profile.size()) - 1, k - 1);
  report.exact_mutual = tail_probability_dp(profile, k);

  Real odd_term(0);   // C * a^[2p+1]
  Real even_term(0);  // C * a^[2m]
  if (!interval.collapsed) {
    odd_term = detail::scaled_prefix_atom(profile, report.coefficient, 2 * interval.p + 1);
    even_term = detail::scaled_prefix_atom(profile, report.coefficient, 2 * interval.m);
  }
  if (k % 2 == 1) {
    report.sharp_lower = report.exact_mutual - odd_term;
    report.sharp_upper = report.exact_mutual + even_term;
    report.s_at_lower = interval.s_max;
    report.s_at_upper = interval.s_min;
  } else {
    report.sharp_lower = report.exact_mutual - even_term;
    report.sharp_upper = report.exact_mutual + odd_term;
    report.s_at_lower = interval.s_min;
    report.s_at_upper = interval.s_max;
  }
  report.sharp_lower = detail::settle_probability(report.sharp_lower, "sharp lower bound");
  report.sharp_upper = detail::settle_probability(report.sharp_upper, "sharp upper bound");
  return report;
}

namespace detail {

template <Scalar Real>
Real product_of(const BasicMarginalProfile<Real>& profile, std::size_t first, std::size_t last,
                bool complement) {
  Real out(1);
  for (std::size_t i = first; i < last && i < profile.size(); ++i) {
    out *= complement ? Real(Real(1) - profile[i]) : profile[i];
  }
  return out;
}

template <Scalar Real>
BoundReport<Real> single_event_report(const BasicMarginalProfile<Real>& profile, long k) {
  BoundReport<Real> report;
  report.k = k;
  report.exact_mutual = report.sharp_lower = report.sharp_upper = profile[0];
  report.s_at_lower = report.s_at_upper = Real(0);
  report.coefficient = 1;
  report.collapsed = true;
  return report;
}

}  // namespace detail

/// Sharp bounds on the union (k = 1) from the closed product forms.
template <Scalar Real>
BoundReport<Real> union_bounds(const BasicMarginalProfile<Real>& profile) {
  if (profile.size() == 1) return detail::single_event_report(profile, 1);
  const std::size_t n = profile.size();
  const SInterval<Real> interval = s_interval(profile);
  const std::size_t odd = 2 * interval.p + 1;
  const std::size_t even = 2 * interval.m;
  using detail::product_of;

  BoundReport<Real> report;
  report.k = 1;
  report.coefficient = 1;
  report.collapsed = interval.collapsed;
  report.exact_mutual = Real(1) - product_of(profile, 0, n, true);
  report.sharp_lower =
      Real(1) - (product_of(profile, 0, odd, true) + product_of(profile, 0, odd, false)) *
                    product_of(profile, odd, n, true);
  report.sharp_upper =
      Real(1) - (product_of(profile, 0, even, true) - product_of(profile, 0, even, false)) *
                    product_of(profile, even, n, true);
  report.s_at_lower = interval.s_max;
  report.s_at_upper = interval.s_min;
  report.sharp_lower = detail::settle_probability(report.sharp_lower, "union lower bound");
  report.sharp_upper = detail::settle_probability(report.sharp_upper, "union upper bound");
  return report;
}

/// Sharp bounds on the intersection (k = n); the formulas depend on the
/// parity of n.
template <Scalar Real>
BoundReport<Real> intersection_bounds(const BasicMarginalProfile<Real>& profile) {
  if (profile.size() == 1) return detail::single_event_report(profile, 1);
  const std::size_t n = profile.size();
  const SInterval<Real> interval = s_interval(profile);
  const std::size_t odd = 2 * interval.p + 1;
  const std::size_t even = 2 * interval.m;
  using detail::product_of;

  const Real odd_head = product_of(profile, 0, odd, false);
  const Real odd_tail = product_of(profile, odd, n, false);
  const Real odd_tail_c = product_of(profile, odd, n, true);
  const Real even_head = product_of(profile, 0, even, false);
  const Real even_tail = product_of(profile, even, n, false);
  const Real even_tail_c = product_of(profile, even, n, true);

  BoundReport<Real> report;
  report.k = static_cast<long>(n);
  report.coefficient = 1;
  report.collapsed = interval.collapsed;
  report.exact_mutual = product_of(profile, 0, n, false);
  if (n % 2 == 0) {
    report.sharp_lower = even_head * (even_tail - even_tail_c);
    report.sharp_upper = odd_head * (odd_tail + odd_tail_c);
    report.s_at_lower = interval.s_min;
    report.s_at_upper = interval.s_max;
  } else {
    report.sharp_lower = odd_head * (odd_tail - odd_tail_c);
    report.sharp_upper = even_head * (even_tail + even_tail_c);
    report.s_at_lower = interval.s_max;
    report.s_at_upper = interval.s_min;
  }
  report.sharp_lower = detail::settle_probability(report.sharp_lower, "intersection lower bound");
  report.sharp_upper = detail::settle_probability(report.sharp_upper, "intersection upper bound");
  return report;
}

enum class BonferroniCase { upper_coincides, lower_coincides, neither };

template <Scalar Real>
struct BonferroniResult {
  BonferroniCase kind = BonferroniCase::neither;
  /// The truncated inclusion-exclusion value 1 - prod(1 - a) -/+ prod(a).
  std::optional<Real> value;
};

/// When a_{n-1} + a_n <= 1 the union bound on the matching side equals the
/// Bonferroni bound truncated at order n - 1 (upper for even n, lower for odd n).
template <Scalar Real>
BonferroniResult<Real> bonferroni_applicable(const BasicMarginalProfile<Real>& profile) {
  const std::size_t n = profile.size();
  if (n < 2) throw ValidationError("Bonferroni comparison needs n >= 2");
  BonferroniResult<Real> result;
  if (profile[n - 2] + profile[n - 1] > 1) return result;
  const Real none = detail::product_of(profile, 0, n, true);
  const Real all = detail::product_of(profile, 0, n, false);
  if (n % 2 == 0) {
    result.kind = BonferroniCase::upper_coincides;
    result.value = Real(1) - none + all;
  } else {
    result.kind = BonferroniCase::lower_coincides;
    result.value = Real(1) - none - all;
  }
  return result;
}

template <Scalar Real>
struct LllComparison {
  /// Sharp lower bound on P(no event occurs).
  Real sharp_no_bad_event;
  /// prod (1 - 2 a_i), the local-lemma bound for dependency degree 1.
  Real product_bound;
  /// a_n < 1 and a_1 + a_2 < 1: guarantees sharp_no_bad_event > 0.
  bool positivity = false;
};

template <Scalar Real>
LllComparison<Real> lll_comparison(const BasicMarginalProfile<Real>& profile) {
  const std::size_t n = profile.size();
  if (n < 2) throw ValidationError("local lemma comparison needs n >= 2");
  LllComparison<Real> out;
  out.sharp_no_bad_event = Real(1) - union_bounds(profile).sharp_upper;
  out.product_bound = Real(1);
  for (std::size_t i = 0; i < n; ++i) out.product_bound *= Real(1) - Real(2 * profile[i]);
  out.positivity = profile[n - 1] < 1 && profile[0] + profile[1] < 1;
  return out;
}

template <Scalar Real>
struct MakarovBounds {
  /// The closed forms as printed, with F2(0) taken as a_n.
  Real lower;
  Real upper;
  /// Two-point convolution over u in {0, 1} with the Bernoulli CDF
  /// F2(0) = 1 - a_n, F2(1) = 1.
  Real convolution_lower;
  Real convolution_upper;

  bool variants_differ() const {
    return !approx_equal(lower, convolution_lower) || !approx_equal(upper, convolution_upper);
  }
};

/// Standard (Makarov) bounds on P(Y1 + Y2 >= k), Y1 the count of the first
/// n-1 sorted events and Y2 the indicator of the last one. k = 0 gives (1, 1).
template <Scalar Real>
MakarovBounds<Real> makarov_bounds(const BasicMarginalProfile<Real>& profile, long k) {
  detail::require_k(profile.size(), k, 0);
  MakarovBounds<Real> out;
  if (k == 0) {
    out.lower = out.upper = out.convolution_lower = out.convolution_upper = Real(1);
    return out;
  }
  const std::size_t n = profile.size();
  const auto head = profile.sorted_values().first(n - 1);
  const TailCdf<Real> f1 = poisson_binomial_cdf(head);
  const Real& a_n = profile[n - 1];
  const Real one(1);
  const Real two(2);

  out.upper = std::min<Real>(two - std::max<Real>(f1(k - 1) + a_n, f1(k - 2) + one), one);
  out.lower = std::max<Real>(one - std::min<Real>(f1(k), f1(k - 1) + a_n), Real(0));

  const Real f2_zero = one - a_n;
  out.convolution_upper =
      std::min<Real>(two - std::max<Real>(f1(k - 1) + f2_zero, f1(k - 2) + one), one);
  out.convolution_lower =
      std::max<Real>(one - std::min<Real>(f1(k - 1), f1(k - 2) + f2_zero), Real(0));
  return out;
}

}  // namespace nwise

#endif  // NWISE_BOUNDS_HPP
