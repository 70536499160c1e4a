#pragma once

#include <stdexcept>
#include <string>

namespace floquet_sep {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a precondition: bad dimensions, off-grid times, empty inputs.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The integrator produced a non-finite value.
class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

// A cone vector was annihilated where a surviving vector was required.
class KernelVector : public Error {
 public:
  using Error::Error;
};

// A structural hypothesis (cooperativity, irreducibility, focusing) or a
// runtime-checked invariant does not hold.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// An iterative estimate did not reach its tolerance.
class NotConverged : public Error {
 public:
  using Error::Error;
};

// A size guard was exceeded.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace floquet_sep
