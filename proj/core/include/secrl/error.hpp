#ifndef SECRL_ERROR_HPP
#define SECRL_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace secrl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula text. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ClosureError : public Error {
 public:
  using Error::Error;
};

class AlternationError : public Error {
 public:
  using Error::Error;
};

class TraceTooShort : public Error {
 public:
  using Error::Error;
};

class UnknownProposition : public Error {
 public:
  using Error::Error;
};

class AlphabetMismatch : public Error {
 public:
  using Error::Error;
};

class WidthError : public Error {
 public:
  using Error::Error;
};

class LabelMismatch : public Error {
 public:
  using Error::Error;
};

class LayoutError : public Error {
 public:
  using Error::Error;
};

class NoFeasibleAction : public Error {
 public:
  using Error::Error;
};

class EmptyFeasibleSet : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The pruned timed MDP leaves the initial state without any feasible action.
class Infeasible : public Error {
 public:
  Infeasible(const std::string& what, double best_bound)
      : Error(what), best_bound_(best_bound) {}

  /// Largest satisfaction bound any initial action achieved before removal.
  double best_bound() const noexcept { return best_bound_; }

 private:
  double best_bound_;
};

}  // namespace secrl

#endif  // SECRL_ERROR_HPP
