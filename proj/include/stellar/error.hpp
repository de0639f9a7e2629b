#pragma once

#include <stdexcept>
#include <string>

namespace stellar {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched variable counts, matrix sizes or out-of-range indices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A core state or polynomial that is identically zero where a nonzero one is required.
class ZeroStateError : public Error {
 public:
  using Error::Error;
};

/// Input that violates an operation's domain (degree, unitarity, factorial range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical stage could not reach a trustworthy decision.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

/// Two independent numerical routes disagree (e.g. monodromy group count vs. Ruppert count).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace stellar
