#ifndef NWISE_ERROR_HPP
#define NWISE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nwise {

/// Input that violates a documented precondition (bad marginal, s outside the
/// feasible interval, k out of range, enumeration cap exceeded).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file; the message carries the line/field position.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nwise

#endif  // NWISE_ERROR_HPP
