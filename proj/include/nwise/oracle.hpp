#ifndef NWISE_ORACLE_HPP
#define NWISE_ORACLE_HPP

// Brute-force verification by enumerating all 2^n atoms. Nothing here uses
// the tail recursion or the closed-form bounds, so the results can be set
// against them.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nwise/marginals.hpp"
#include "nwise/measure_family.hpp"
#include "nwise/scalar.hpp"
#include "nwise/subset_mask.hpp"

namespace nwise {

/// P(at least k events) = sum of atoms with |J| >= k.
template <Scalar Real>
Real enumerate_tail(const AtomicMeasure<Real>& measure, long k) {
  require_enumerable(measure.n);
  Real total(0);
  for (std::size_t mask = 0; mask < measure.atoms.size(); ++mask) {
    if (SubsetMask(mask).cardinality() >= k) total += measure.atoms[mask];
  }
  return total;
}

/// enumerate_tail for every k = 0..n in one pass.
template <Scalar Real>
std::vector<Real> enumerate_tails(const AtomicMeasure<Real>& measure) {
  require_enumerable(measure.n);
  std::vector<Real> by_count(measure.n + 1, Real(0));
  for (std::size_t mask = 0; mask < measure.atoms.size(); ++mask) {
    by_count[static_cast<std::size_t>(SubsetMask(mask).cardinality())] += measure.atoms[mask];
  }
  std::vector<Real> tails(measure.n + 1, Real(0));
  Real running(0);
  for (std::size_t q = measure.n + 1; q-- > 0;) {
    running += by_count[q];
    tails[q] = running;
  }
  return tails;
}

struct LemmaViolation {
  std::string check;
  SubsetMask witness;
};

template <Scalar Real>
struct VerificationReport {
  std::size_t n = 0;
  Real normalization_residual;
  Real min_atom;
  /// |P(A_i) - a_i| in the caller's original event order.
  std::vector<Real> marginal_residuals;
  /// Largest |P(cap_{j in J} A_j) - prod_{j in J} a_j| over proper J.
  Real max_product_rule_residual;
  std::size_t independence_order = 0;
  std::vector<LemmaViolation> lemma_violations;

  bool passed() const {
    const Real tol = ScalarTraits<Real>::tolerance();
    if (abs_value(normalization_residual) > tol) return false;
    if (min_atom < -tol) return false;
    for (const Real& r : marginal_residuals) {
      if (abs_value(r) > tol) return false;
    }
    return independence_order + 1 >= n;
  }

  Real max_marginal_residual() const {
    Real worst(0);
    for (const Real& r : marginal_residuals) worst = std::max<Real>(worst, abs_value(r));
    return worst;
  }
};

namespace detail {

// x >= y up to rounding: exact for rationals, relative 1e-12 for doubles.
template <Scalar Real>
bool not_less(const Real& x, const Real& y) {
  if constexpr (ScalarTraits<Real>::exact) {
    return x >= y;
  } else {
    return x >= y - ScalarTraits<double>::tolerance() * std::fabs(y);
  }
}

// Sum over supersets I of J (I = J included) for every J.
template <Scalar Real>
std::vector<Real> superset_sums(std::vector<Real> values, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t mask = 0; mask < values.size(); ++mask) {
      if ((mask & bit) == 0) values[mask] += values[mask | bit];
    }
  }
  return values;
}

// Whether sum_{I superset of J} v_I vanishes for every proper subset J;
// reports the first failing J.
template <Scalar Real>
bool kernel_holds(std::span<const Real> v, std::size_t n, SubsetMask* witness) {
  const std::vector<Real> sums = superset_sums(std::vector<Real>(v.begin(), v.end()), n);
  const std::size_t full = (std::size_t{1} << n) - 1;
  for (std::size_t mask = 0; mask < full; ++mask) {
    if (!approx_equal(sums[mask], Real(0))) {
      if (witness) *witness = SubsetMask(mask);
      return false;
    }
  }
  return true;
}

}  // namespace detail

/// Checks a measure against the (n-1)-wise system: normalization,
/// nonnegativity, marginals, the product rule for every proper subset and,
/// for family members, that the deviation from the product measure lies in
/// the kernel of the homogeneous system. Failures are reported, not thrown.
template <Scalar Real>
VerificationReport<Real> verify_measure(const AtomicMeasure<Real>& measure,
                                        const BasicMarginalProfile<Real>& profile) {
  require_enumerable(measure.n);
  if (measure.n != profile.size() || measure.atoms.size() != (std::size_t{1} << measure.n)) {
    throw ValidationError("measure and profile disagree on the number of events");
  }
  const std::size_t n = measure.n;
  const std::size_t full = measure.atoms.size() - 1;
  VerificationReport<Real> report;
  report.n = n;

  Real total(0);
  report.min_atom = measure.atoms[0];
  SubsetMask negative;
  bool has_negative = false;
  for (std::size_t mask = 0; mask < measure.atoms.size(); ++mask) {
    total += measure.atoms[mask];
    if (measure.atoms[mask] < report.min_atom) report.min_atom = measure.atoms[mask];
    if (!has_negative && measure.atoms[mask] < -ScalarTraits<Real>::tolerance()) {
      has_negative = true;
      negative = SubsetMask(mask);
    }
  }
  report.normalization_residual = total - Real(1);
  if (!approx_equal(total, Real(1))) report.lemma_violations.push_back({"normalization", {}});
  if (has_negative) report.lemma_violations.push_back({"nonnegativity", negative});

  const std::vector<Real> joint = detail::superset_sums(measure.atoms, n);
  const std::vector<Real> products = marginal_products(profile);

  report.marginal_residuals.assign(n, Real(0));
  bool marginal_reported = false;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t mask = std::size_t{1} << j;
    report.marginal_residuals[profile.permutation()[j]] = abs_value(Real(joint[mask] - profile[j]));
    if (!marginal_reported && !approx_equal(joint[mask], profile[j])) {
      report.lemma_violations.push_back({"marginal", SubsetMask(mask)});
      marginal_reported = true;
    }
  }

  report.max_product_rule_residual = Real(0);
  report.independence_order = n;
  bool product_reported = false;
  for (std::size_t mask = 1; mask <= full; ++mask) {
    const Real residual = abs_value(Real(joint[mask] - products[mask]));
    const auto card = static_cast<std::size_t>(SubsetMask(mask).cardinality());
    const bool holds = approx_equal(joint[mask], products[mask]);
    if (mask != full) {
      if (residual > report.max_product_rule_residual) report.max_product_rule_residual = residual;
      if (!holds && !product_reported) {
        report.lemma_violations.push_back({"product-rule", SubsetMask(mask)});
        product_reported = true;
      }
    }
    if (!holds && card <= report.independence_order) report.independence_order = card - 1;
  }

  if (measure.s) {
    std::vector<Real> deviation = product_atoms(profile);
    for (std::size_t mask = 0; mask <= full; ++mask) {
      deviation[mask] = measure.atoms[mask] - deviation[mask];
    }
    SubsetMask witness;
    if (!detail::kernel_holds<Real>(deviation, n, &witness)) {
      report.lemma_violations.push_back({"kernel", witness});
    }
  }
  return report;
}

/// v_J = (-1)^|J| s solves the homogeneous system.
template <Scalar Real>
bool verify_kernel(std::size_t n, const Real& s) {
  require_enumerable(n);
  std::vector<Real> v(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < v.size(); ++mask) {
    v[mask] = SubsetMask(mask).odd() ? Real(-s) : s;
  }
  return detail::kernel_holds<Real>(v, n, nullptr);
}

/// Kernel test for an arbitrary vector of 2^n values.
template <Scalar Real>
bool verify_kernel_vector(std::span<const Real> v, std::size_t n) {
  require_enumerable(n);
  if (v.size() != (std::size_t{1} << n)) throw ValidationError("vector must have 2^n entries");
  return detail::kernel_holds<Real>(v, n, nullptr);
}

template <Scalar Real>
struct ExtremalAtomCheck {
  bool passed = true;
  SubsetMask odd_argmin;
  SubsetMask even_argmin;
  Real odd_min;
  Real even_min;
  std::vector<LemmaViolation> violations;

  explicit operator bool() const { return passed; }
};

/// Exhaustively confirms that (a) every atom dominates the prefix atom of
/// the same cardinality, (b) the smallest odd atom is a^[2p+1] and (c) the
/// smallest even atom is a^[2m]. Ties are allowed.
template <Scalar Real>
ExtremalAtomCheck<Real> verify_extremal_atoms(const BasicMarginalProfile<Real>& profile) {
  const std::size_t n = profile.size();
  require_enumerable(n);
  const std::vector<Real> atoms = product_atoms(profile);
  const std::size_t p = invariant_p(profile);
  const std::size_t m = invariant_m(profile);
  const Real& odd_target = atoms[SubsetMask::prefix(2 * p + 1).bits()];
  const Real& even_target = atoms[SubsetMask::prefix(2 * m).bits()];

  ExtremalAtomCheck<Real> check;
  check.odd_argmin = SubsetMask::prefix(1);
  check.even_argmin = SubsetMask(0);
  check.odd_min = atoms[1];
  check.even_min = atoms[0];
  bool prefix_reported = false;
  bool odd_reported = false;
  bool even_reported = false;
  for (std::size_t mask = 0; mask < atoms.size(); ++mask) {
    const SubsetMask J(mask);
    const Real& prefix = atoms[SubsetMask::prefix(static_cast<std::size_t>(J.cardinality())).bits()];
    if (!detail::not_less(atoms[mask], prefix) && !prefix_reported) {
      check.violations.push_back({"prefix-domination", J});
      prefix_reported = true;
    }
    if (J.odd()) {
      if (atoms[mask] < check.odd_min) {
        check.odd_min = atoms[mask];
        check.odd_argmin = J;
      }
      if (!detail::not_less(atoms[mask], odd_target) && !odd_reported) {
        check.violations.push_back({"odd-minimum", J});
        odd_reported = true;
      }
    } else {
      if (atoms[mask] < check.even_min) {
        check.even_min = atoms[mask];
        check.even_argmin = J;
      }
      if (!detail::not_less(atoms[mask], even_target) && !even_reported) {
        check.violations.push_back({"even-minimum", J});
        even_reported = true;
      }
    }
  }
  check.passed = check.violations.empty();
  return check;
}

template <Scalar Real>
struct SharpnessScan {
  Real empirical_min;
  Real empirical_max;
  Real argmin_s;
  Real argmax_s;
  std::size_t grid_points = 0;
};

/// Default number of grid points for sharpness scans.
inline constexpr std::size_t kDefaultGridPoints = 1001;

/// Evenly spaced s values over the feasible interval, both endpoints exact.
template <Scalar Real>
std::vector<Real> s_grid(const SInterval<Real>& interval, std::size_t grid_points) {
  if (grid_points < 2) throw ValidationError("grid needs at least 2 points");
  std::vector<Real> grid(grid_points);
  const Real width = interval.s_max - interval.s_min;
  for (std::size_t i = 0; i < grid_points; ++i) {
    grid[i] = interval.s_min + width * Real(static_cast<long>(i)) /
                                   Real(static_cast<long>(grid_points - 1));
  }
  grid.front() = interval.s_min;
  grid.back() = interval.s_max;
  return grid;
}

/// Tail probability by enumeration at every grid s; the first grid point
/// attaining each extreme is reported.
template <Scalar Real>
SharpnessScan<Real> scan_sharpness(const BasicMarginalProfile<Real>& profile, long k,
                                   std::size_t grid_points = kDefaultGridPoints) {
  require_enumerable(profile.size());
  const std::vector<Real> grid = s_grid(s_interval(profile), grid_points);
  SharpnessScan<Real> scan;
  scan.grid_points = grid_points;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Real value = enumerate_tail(build_measure(profile, grid[i]), k);
    if (i == 0 || value < scan.empirical_min) {
      scan.empirical_min = value;
      scan.argmin_s = grid[i];
    }
    if (i == 0 || value > scan.empirical_max) {
      scan.empirical_max = value;
      scan.argmax_s = grid[i];
    }
  }
  return scan;
}

/// Seeded random marginals, each of the form j / 10^6 so that the same
/// profile is usable in floating and rational mode.
inline std::vector<double> random_decimal_marginals(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::int64_t> pick(0, kMaxExactDenominator);
  std::vector<double> values(n);
  for (double& v : values) {
    v = static_cast<double>(pick(rng)) / static_cast<double>(kMaxExactDenominator);
  }
  return values;
}

}  // namespace nwise

#endif  // NWISE_ORACLE_HPP
