#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyptime {

/// Point outside a domain, parameter out of range, empty input.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Derivative requested at a point of the singular set.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite value produced while iterating a map.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::int64_t index)
      : std::runtime_error(what + " (index " + std::to_string(index) + ")"),
        index_(index) {}

  std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

/// Ensemble sampling could not produce a valid orbit within the retry cap.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The orbit hit the singular set before the requested index.
class InvalidTraceError : public std::runtime_error {
 public:
  InvalidTraceError(const std::string& what, std::int64_t truncated_at)
      : std::runtime_error(what + " (truncated at index " +
                           std::to_string(truncated_at) + ")"),
        truncated_at_(truncated_at) {}

  std::int64_t truncated_at() const noexcept { return truncated_at_; }

 private:
  std::int64_t truncated_at_;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DiscretizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotApplicableError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Configuration rejected; carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace hyptime
