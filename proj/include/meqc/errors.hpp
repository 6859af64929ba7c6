#pragma once

#include <stdexcept>
#include <string>

namespace meqc {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration value is outside its admissible range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A physical quantity outside the domain of a formula (T <= 0, eps_thr <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller broke an operation's precondition (shape mismatch, invalid indicator set).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Unknown server/user index.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Data must be transmitted over a link with zero rate.
class InfeasibleLinkError : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration would exceed the configured budget.
class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or parameters during learning.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Unsupported error-correction concatenation level.
class UnsupportedLevelError : public Error {
 public:
  using Error::Error;
};

}  // namespace meqc
