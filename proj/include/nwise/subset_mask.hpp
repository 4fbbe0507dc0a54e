#ifndef NWISE_SUBSET_MASK_HPP
#define NWISE_SUBSET_MASK_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>

namespace nwise {

/// A subset J of the events, in sorted index space: bit j set means the event
/// at sorted position j (0-based) occurs.
class SubsetMask {
 public:
  using Bits = std::uint64_t;

  constexpr SubsetMask() = default;
  constexpr explicit SubsetMask(Bits bits) : bits_(bits) {}

  /// Builds a mask from 1-based sorted positions, e.g. {1, 3}.
  static constexpr SubsetMask of(std::initializer_list<std::size_t> positions) {
    Bits bits = 0;
    for (std::size_t pos : positions) bits |= Bits{1} << (pos - 1);
    return SubsetMask(bits);
  }

  /// The prefix [len] = {1, ..., len}.
  static constexpr SubsetMask prefix(std::size_t len) {
    return SubsetMask(len >= 64 ? ~Bits{0} : (Bits{1} << len) - 1);
  }

  constexpr Bits bits() const { return bits_; }
  constexpr int cardinality() const { return std::popcount(bits_); }
  constexpr bool contains(std::size_t sorted_position) const {
    return sorted_position < 64 && ((bits_ >> sorted_position) & 1U) != 0;
  }
  constexpr bool odd() const { return (cardinality() & 1) != 0; }

  friend constexpr bool operator==(SubsetMask, SubsetMask) = default;

 private:
  Bits bits_ = 0;
};

}  // namespace nwise

#endif  // NWISE_SUBSET_MASK_HPP
