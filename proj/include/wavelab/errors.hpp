#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wavelab {

/// Medium parameters violate positivity or definiteness requirements.
class InvalidMedium : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative or algebraic solve failed to reach its tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what,
                            std::vector<double> residuals = {})
      : std::runtime_error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Two wave branches coincide, so the group velocity of a branch is undefined.
class DegenerateBranch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The PML metric was evaluated at its pole s = -alpha.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite values appeared during time stepping.
class UnstableRun : public std::runtime_error {
 public:
  UnstableRun(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Scenario file rejected; key() names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Caller broke a precondition (shape mismatch, incompatible discretizations).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace wavelab
