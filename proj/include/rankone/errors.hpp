#pragma once

#include <stdexcept>
#include <string>

namespace rankone {

// Root of everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (bad syntax, non-finite entries, k > n).
class InputError : public Error {
 public:
  using Error::Error;
};

// A scalar was evaluated outside a function's declared domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A requested matrix cannot be built inside the requested region.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed (non-convergence and similar).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Sampled data contradicts the classification the caller asked for.
// `kind` is a stable machine-readable tag used in CLI reports.
class ClassificationError : public Error {
 public:
  ClassificationError(std::string kind, const std::string& what)
      : Error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace rankone
