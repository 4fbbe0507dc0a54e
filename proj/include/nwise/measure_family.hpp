#ifndef NWISE_MEASURE_FAMILY_HPP
#define NWISE_MEASURE_FAMILY_HPP

// The one-parameter family of probability measures on the 2^n atoms under
// which n events with fixed marginals are (n-1)-wise independent:
//
//   P(atom J) = a^J + (-1)^|J| s,   a^J = prod_{j in J} a_j prod_{j not in J} (1 - a_j),
//
// with s restricted to [-a^[2m], a^[2p+1]] (prefix atoms of the sorted profile).

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nwise/error.hpp"
#include "nwise/marginals.hpp"
#include "nwise/scalar.hpp"
#include "nwise/subset_mask.hpp"

namespace nwise {

/// Largest n for which dense 2^n atom arrays are built.
inline constexpr std::size_t kEnumerationCap = 20;

inline void require_enumerable(std::size_t n) {
  if (n > kEnumerationCap) {
    throw ValidationError("n = " + std::to_string(n) + " exceeds the enumeration cap of " +
                          std::to_string(kEnumerationCap) + " events");
  }
}

template <Scalar Real>
struct SInterval {
  Real s_min;
  Real s_max;
  std::size_t p = 0;
  std::size_t m = 0;
  /// True when the interval is the single point {0}: some marginal is 0 or 1,
  /// or n = 1. The endpoint measures then coincide and are not unique in the
  /// sense of the sharpness results.
  bool collapsed = false;

  bool contains(const Real& s, const Real& slack = Real(0)) const {
    return s >= s_min - slack && s <= s_max + slack;
  }
};

template <Scalar Real>
struct AtomicMeasure {
  std::size_t n = 0;
  /// Entry at mask J is P(atom J); masks are in sorted index space.
  std::vector<Real> atoms;
  /// Family parameter; empty for externally supplied measures.
  std::optional<Real> s;

  const Real& operator[](SubsetMask J) const { return atoms[J.bits()]; }
  Real& operator[](SubsetMask J) { return atoms[J.bits()]; }
};

/// a^J. Factors are multiplied in ascending sorted position so that every
/// routine producing the same atom produces the same bits.
template <Scalar Real>
Real atom_product(const BasicMarginalProfile<Real>& profile, SubsetMask J) {
  Real product(1);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (J.contains(i)) {
      product *= profile[i];
    } else {
      product *= Real(1) - profile[i];
    }
  }
  return product;
}

/// a^[len] = a_1 ... a_len (1 - a_{len+1}) ... (1 - a_n).
template <Scalar Real>
Real prefix_atom(const BasicMarginalProfile<Real>& profile, std::size_t len) {
  Real product(1);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i < len) {
      product *= profile[i];
    } else {
      product *= Real(1) - profile[i];
    }
  }
  return product;
}

/// Largest p <= floor((n-1)/2) with a_{2i} + a_{2i+1} <= 1 for all i in [p].
template <Scalar Real>
std::size_t invariant_p(const BasicMarginalProfile<Real>& profile) {
  std::size_t p = 0;
  // 1-based a_{2p+2} + a_{2p+3} sits at 0-based positions 2p+1, 2p+2.
  while (2 * p + 3 <= profile.size() && profile[2 * p + 1] + profile[2 * p + 2] <= 1) ++p;
  return p;
}

/// Largest m <= floor(n/2) with a_{2i-1} + a_{2i} <= 1 for all i in [m].
template <Scalar Real>
std::size_t invariant_m(const BasicMarginalProfile<Real>& profile) {
  std::size_t m = 0;
  while (2 * m + 2 <= profile.size() && profile[2 * m] + profile[2 * m + 1] <= 1) ++m;
  return m;
}

namespace detail {

// Whether a^[len] has a factor that is exactly zero.
template <Scalar Real>
bool prefix_atom_vanishes(const BasicMarginalProfile<Real>& profile, std::size_t len) {
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i < len ? profile[i] == 0 : profile[i] == 1) return true;
  }
  return false;
}

template <Scalar Real>
std::string describe(const Real& x) {
  std::ostringstream out;
  out.precision(17);
  out << to_double(x);
  return out.str();
}

}  // namespace detail

/// Feasible range of s. For n = 1 only s = 0 keeps P(A_1) = a_1, so the
/// interval collapses.
template <Scalar Real>
SInterval<Real> s_interval(const BasicMarginalProfile<Real>& profile) {
  SInterval<Real> interval;
  interval.p = invariant_p(profile);
  interval.m = invariant_m(profile);
  if (profile.size() == 1) {
    interval.s_min = Real(0);
    interval.s_max = Real(0);
    interval.collapsed = true;
    return interval;
  }
  interval.s_max = prefix_atom(profile, 2 * interval.p + 1);
  interval.s_min = -prefix_atom(profile, 2 * interval.m);
  if constexpr (std::same_as<Real, double>) {
    // -0.0 would print with a sign.
    if (interval.s_min == 0) interval.s_min = 0.0;
  }
  interval.collapsed = detail::prefix_atom_vanishes(profile, 2 * interval.p + 1) &&
                       detail::prefix_atom_vanishes(profile, 2 * interval.m);
  return interval;
}

/// All 2^n product atoms a^J, indexed by mask.
template <Scalar Real>
std::vector<Real> product_atoms(const BasicMarginalProfile<Real>& profile) {
  require_enumerable(profile.size());
  std::vector<Real> atoms(std::size_t{1} << profile.size());
  atoms[0] = Real(1);
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const std::size_t half = std::size_t{1} << j;
    const Real complement = Real(1) - profile[j];
    for (std::size_t mask = 0; mask < half; ++mask) {
      atoms[mask | half] = atoms[mask] * profile[j];
      atoms[mask] *= complement;
    }
  }
  return atoms;
}

/// The family member with parameter s. Throws ValidationError when s lies
/// outside the feasible interval (beyond the floating slack).
template <Scalar Real>
AtomicMeasure<Real> build_measure(const BasicMarginalProfile<Real>& profile, const Real& s) {
  const SInterval<Real> interval = s_interval(profile);
  const Real slack = ScalarTraits<Real>::tolerance();

  AtomicMeasure<Real> measure;
  measure.n = profile.size();
  measure.s = s;
  measure.atoms = product_atoms(profile);
  for (std::size_t mask = 0; mask < measure.atoms.size(); ++mask) {
    if (SubsetMask(mask).odd()) {
      measure.atoms[mask] -= s;
    } else {
      measure.atoms[mask] += s;
    }
  }

  if (!interval.contains(s, slack)) {
    const bool above = s > interval.s_max;
    std::ostringstream msg;
    msg << "s = " << detail::describe(s) << " outside feasible interval: "
        << (above ? "exceeds s_max = " : "below s_min = ")
        << detail::describe(above ? interval.s_max : interval.s_min);
    for (std::size_t mask = 0; mask < measure.atoms.size(); ++mask) {
      if (measure.atoms[mask] < 0) {
        msg << "; atom {";
        const auto members = profile.original_indices(SubsetMask(mask));
        for (std::size_t i = 0; i < members.size(); ++i) msg << (i ? "," : "") << members[i];
        msg << "} would be " << detail::describe(measure.atoms[mask]);
        break;
      }
    }
    throw ValidationError(msg.str());
  }

  if constexpr (!ScalarTraits<Real>::exact) {
    for (Real& atom : measure.atoms) {
      if (atom < 0 && atom >= -slack) atom = 0;
    }
  }
  return measure;
}

enum class Parity { even, odd };

/// Marginals all 1/2; A_1..A_{n-1} mutually independent and A_n occurs exactly
/// when the number of occurrences among A_1..A_{n-1} has the given parity.
/// Built directly from that rule, not through build_measure.
template <Scalar Real = double>
AtomicMeasure<Real> parity_construction(std::size_t n, Parity parity) {
  if (n < 2) throw ValidationError("parity construction needs n >= 2");
  require_enumerable(n);
  AtomicMeasure<Real> measure;
  measure.n = n;
  measure.atoms.assign(std::size_t{1} << n, Real(0));
  const SubsetMask::Bits last = SubsetMask::Bits{1} << (n - 1);
  Real weight(1);
  for (std::size_t i = 0; i + 1 < n; ++i) weight /= 2;
  for (SubsetMask::Bits head = 0; head < last; ++head) {
    const bool even_count = (SubsetMask(head).cardinality() % 2) == 0;
    const bool last_occurs = (parity == Parity::even) == even_count;
    measure.atoms[head | (last_occurs ? last : 0)] = weight;
  }
  Real s = weight / 2;
  measure.s = parity == Parity::even ? Real(-s) : s;
  return measure;
}

/// P(intersection of A_j, j in J) = sum of atoms over supersets of J.
template <Scalar Real>
Real joint_probability(const AtomicMeasure<Real>& measure, SubsetMask J) {
  const SubsetMask::Bits full = (SubsetMask::Bits{1} << measure.n) - 1;
  const SubsetMask::Bits free = full & ~J.bits();
  // Enumerate submasks of `free` in increasing order for a fixed summation order.
  Real total(0);
  SubsetMask::Bits extra = 0;
  while (true) {
    total += measure.atoms[J.bits() | extra];
    if (extra == free) break;
    extra = (extra - free) & free;
  }
  return total;
}

/// Joint probabilities for every mask at once (superset-sum transform).
template <Scalar Real>
std::vector<Real> joint_probabilities(const AtomicMeasure<Real>& measure) {
  std::vector<Real> joint = measure.atoms;
  for (std::size_t j = 0; j < measure.n; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t mask = 0; mask < joint.size(); ++mask) {
      if ((mask & bit) == 0) joint[mask] += joint[mask | bit];
    }
  }
  return joint;
}

/// prod_{j in J} a_j for every mask.
template <Scalar Real>
std::vector<Real> marginal_products(const BasicMarginalProfile<Real>& profile) {
  require_enumerable(profile.size());
  std::vector<Real> products(std::size_t{1} << profile.size());
  products[0] = Real(1);
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const std::size_t half = std::size_t{1} << j;
    for (std::size_t mask = 0; mask < half; ++mask) {
      products[mask | half] = products[mask] * profile[j];
    }
  }
  return products;
}

/// Largest l such that the product rule holds for every J with |J| <= l.
/// Returns n for mutual independence and 0 when a marginal is off.
template <Scalar Real>
std::size_t independence_order(const AtomicMeasure<Real>& measure,
                               const BasicMarginalProfile<Real>& profile) {
  if (measure.n != profile.size()) {
    throw ValidationError("measure and profile disagree on the number of events");
  }
  require_enumerable(measure.n);
  const std::vector<Real> joint = joint_probabilities(measure);
  const std::vector<Real> products = marginal_products(profile);
  std::size_t order = measure.n;
  for (std::size_t mask = 1; mask < joint.size(); ++mask) {
    const auto card = static_cast<std::size_t>(SubsetMask(mask).cardinality());
    if (card <= order && !approx_equal(joint[mask], products[mask])) order = card - 1;
  }
  return order;
}

}  // namespace nwise

#endif  // NWISE_MEASURE_FAMILY_HPP
