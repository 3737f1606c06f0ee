#pragma once

#include <stdexcept>
#include <string>

namespace loopmaps {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or truncation windows do not match.
class SizeMismatch : public Error {
 public:
  using Error::Error;
};

/// A finite-dimensional factorization hit a singular or ill-conditioned input.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// A frame or form does not have the rank the operation needs.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Truncated Laurent arithmetic or sampling lost more than the tolerance.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A gauge, uniton or dressing precondition failed on the grid.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented domain restriction (parity, reality, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Configuration or file-format problem (exit code 2 in the CLI).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace loopmaps
