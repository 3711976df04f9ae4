#pragma once

#include <stdexcept>
#include <string>

namespace fracstep {

// Bad experiment/config input. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string msg, int line = -1, std::string field = {})
      : std::runtime_error(format(msg, line, field)), line_(line), field_(std::move(field)) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(const std::string& msg, int line, const std::string& field) {
    std::string out;
    if (line >= 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "field '" + field + "': ";
    return out + msg;
  }
  int line_;
  std::string field_;
};

// Nonlinear solve failed to converge. CLI maps this to exit code 3.
class SolverError : public std::runtime_error {
 public:
  SolverError(int step, double residual, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what +
                           " (residual " + std::to_string(residual) + ")"),
        step_(step), residual_(residual) {}

  int step() const { return step_; }
  double residual() const { return residual_; }

 private:
  int step_;
  double residual_;
};

}  // namespace fracstep
