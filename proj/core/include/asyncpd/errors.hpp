#pragma once

#include <stdexcept>
#include <string>

namespace asyncpd {

/// Rejected input: malformed problem data, violated preconditions, bad config.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical evaluation produced non-finite or otherwise unusable values.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested parameter target cannot be met; carries the achievable frontier.
class InfeasibleParameterError : public std::runtime_error {
 public:
  InfeasibleParameterError(const std::string& what, double achievable)
      : std::runtime_error(what), achievable_(achievable) {}
  double achievable() const { return achievable_; }

 private:
  double achievable_;
};

/// Internal protocol invariant broken; indicates a bug, not bad input.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace asyncpd
