#pragma once

#include <stdexcept>
#include <string>

namespace finnet {

// Bad argument to a constructor or operation (negative radius, L < 3, point outside region).
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a special function.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Quadrature, series or inversion did not reach its tolerance, or produced a non-finite value.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Valid input that the selected method cannot handle (e.g. non-integer m0 on the RLPG route).
struct Unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fading CDF coefficients that do not describe a distribution.
struct ModelInconsistency : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed scenario document; the message names the offending field.
struct ParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace finnet
