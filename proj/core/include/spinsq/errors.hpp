// errors.hpp — exception taxonomy shared by all spinsq modules

#pragma once

#include <stdexcept>

namespace spinsq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver missed its tolerance within the iteration cap, or a
// tabulated curve failed a build-time sanity check.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input degenerate for the requested quantity (e.g. zero polarization).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Container sizes inconsistent with the requested operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Problem size exceeds a hard implementation limit.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinsq
