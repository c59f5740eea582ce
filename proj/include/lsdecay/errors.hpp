#ifndef LSDECAY_ERRORS_HPP
#define LSDECAY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lsdecay {

// Base class for all library errors. The CLI maps ConfigError to exit
// code 2 and every other Error to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A parameter is outside the range a formula is stated for (e.g. beta <= 0).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An input value is outside an operation's domain (negative t, empty field).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A hypothesis guard failed: limit condition not verifiable, theta out of
// the admissible interval, regime outside theorem scope.
class ApplicabilityError : public Error {
 public:
  using Error::Error;
};

// A growth function required to be conforming is not (strict mode).
class AxiomError : public Error {
 public:
  using Error::Error;
};

// An iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Non-finite intermediate value or linear-solver stagnation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A request exceeds a hard size cap (e.g. envelope level count).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Too few usable samples to run a classification or fit.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Bad CLI usage or malformed config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsdecay

#endif
