#pragma once

#include <stdexcept>
#include <string>

namespace qincompat {

// Base class for all typed failures raised by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or out-of-contract input (bad dimensions, out-of-range noise, ...).
class InvalidInput : public Error {
  public:
    using Error::Error;
};

// A matrix that must be invertible (or strictly positive) is numerically singular.
class SingularMatrix : public Error {
  public:
    using Error::Error;
};

// The parameter derivative of the state leaves the support of rho; the SLD
// (and the quantum Fisher information) diverges.
class ModelNotDifferentiable : public Error {
  public:
    using Error::Error;
};

// Fisher matrix numerically singular: some parameter direction carries no
// information at this point of the model.
class SingularFisher : public Error {
  public:
    using Error::Error;
};

// A construction that needs two independent generators received a degenerate pair.
class DegenerateModel : public Error {
  public:
    using Error::Error;
};

// Requested an anti-parallel construction for a model whose commutator already
// vanishes: nothing to fix.
class NoConstructionNeeded : public Error {
  public:
    using Error::Error;
};

}  // namespace qincompat
