#pragma once

#include <stdexcept>
#include <string>

namespace qmam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public Error {
 public:
  using Error::Error;
};

// An iterative kernel missed its accuracy contract; carries the best residual reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Caller broke a documented promise on the input (norm bound, positivity, ...).
class PromiseViolation : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Internal sequencing rule of the solver was broken.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace qmam
