#ifndef NWISE_MARGINALS_HPP
#define NWISE_MARGINALS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nwise/error.hpp"
#include "nwise/scalar.hpp"
#include "nwise/subset_mask.hpp"

namespace nwise {

/**
 * Marginal probabilities a_1 <= ... <= a_n of n events.
 *
 * Values are kept stable-sorted; permutation()[i] is the original (0-based)
 * input position of the value stored at sorted position i. Every computation
 * in the library runs in sorted space and the permutation translates results
 * back to the caller's event order.
 */
template <Scalar Real>
class BasicMarginalProfile {
 public:
  /// Validates and sorts. Throws ValidationError naming the 1-based index of
  /// the first bad value.
  static BasicMarginalProfile from_raw(std::span<const Real> values) {
    if (values.empty()) throw ValidationError("marginal vector is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const Real& v = values[i];
      if constexpr (std::same_as<Real, double>) {
        if (!std::isfinite(v)) {
          throw ValidationError("non-finite value at index " + std::to_string(i + 1));
        }
      }
      if (v < 0 || v > 1) {
        throw ValidationError("value out of [0,1] at index " + std::to_string(i + 1));
      }
    }
    BasicMarginalProfile profile;
    profile.permutation_.resize(values.size());
    std::iota(profile.permutation_.begin(), profile.permutation_.end(), std::size_t{0});
    std::stable_sort(profile.permutation_.begin(), profile.permutation_.end(),
                     [&](std::size_t lhs, std::size_t rhs) { return values[lhs] < values[rhs]; });
    profile.sorted_.reserve(values.size());
    for (std::size_t idx : profile.permutation_) profile.sorted_.push_back(values[idx]);
    return profile;
  }

  static BasicMarginalProfile from_raw(const std::vector<Real>& values) {
    return from_raw(std::span<const Real>(values));
  }

  std::size_t size() const { return sorted_.size(); }

  /// The sorted marginal at 0-based sorted position i.
  const Real& operator[](std::size_t i) const { return sorted_[i]; }

  std::span<const Real> sorted_values() const { return sorted_; }
  std::span<const std::size_t> permutation() const { return permutation_; }

  /// Marginals in the caller's original order.
  std::vector<Real> original_values() const {
    std::vector<Real> out(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) out[permutation_[i]] = sorted_[i];
    return out;
  }

  /// 1-based original indices of the events in a sorted-space mask, ascending.
  std::vector<std::size_t> original_indices(SubsetMask mask) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
      if (mask.contains(i)) out.push_back(permutation_[i] + 1);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Sorted-space mask of a set of 1-based original indices.
  SubsetMask mask_of_original(std::span<const std::size_t> indices) const {
    SubsetMask::Bits bits = 0;
    for (std::size_t original : indices) {
      if (original == 0 || original > sorted_.size()) {
        throw ValidationError("event index " + std::to_string(original) + " out of range");
      }
      const auto it = std::find(permutation_.begin(), permutation_.end(), original - 1);
      bits |= SubsetMask::Bits{1} << static_cast<std::size_t>(it - permutation_.begin());
    }
    return SubsetMask(bits);
  }

  friend bool operator==(const BasicMarginalProfile&, const BasicMarginalProfile&) = default;

 private:
  BasicMarginalProfile() = default;

  std::vector<Real> sorted_;
  std::vector<std::size_t> permutation_;
};

using MarginalProfile = BasicMarginalProfile<double>;
using ExactProfile = BasicMarginalProfile<Rational>;

/// Same profile in exact arithmetic. Each value must be a decimal with
/// denominator <= kMaxExactDenominator; the permutation is preserved.
ExactProfile to_exact(const MarginalProfile& profile);

enum class ProfileFormat { csv, json };

/// Picks the format from the file extension (.json, otherwise csv).
ProfileFormat format_for_path(const std::filesystem::path& path);

/// CSV: one probability per line, no header. JSON: {"marginals": [...]}.
std::vector<double> parse_marginals(const std::string& text, ProfileFormat format);

MarginalProfile load_profile(const std::filesystem::path& path, ProfileFormat format);

/// Parses an inline comma list such as "0.1,0.2,0.3".
std::vector<double> parse_marginal_list(const std::string& list);

/// JSON document in the load_profile schema, values in original order.
std::string profile_to_json(const MarginalProfile& profile);

}  // namespace nwise

#endif  // NWISE_MARGINALS_HPP
