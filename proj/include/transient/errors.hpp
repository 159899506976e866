#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace transient {

using cplx = std::complex<double>;

/// Malformed or physically inadmissible input (bad field, mismatched grids).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Overflow, loss of convergence or a degenerate linear system.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace transient
