#pragma once

#include <stdexcept>
#include <string>

namespace cgap {

// Argument outside the domain of a closed-form map.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Pose outside the admissible set.
class AdmissibilityError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Adaptive quadrature could not meet its tolerance.
class QuadratureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

} // namespace cgap
