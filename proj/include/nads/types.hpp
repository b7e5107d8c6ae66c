// Common scalar aliases and the error hierarchy shared by every module.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nads {

using Complex = std::complex<double>;

/// Interaction-picture amplitude pair (a1, a2).
using Amplitudes = Eigen::Vector2cd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Broad failure classes; the CLI maps each to a distinct exit code.
enum class ErrorCategory { validation, numeric, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category), message_(what) {}
  ErrorCategory category() const noexcept { return category_; }
  const char* what() const noexcept override { return message_.c_str(); }

  /// Prefixes the message, e.g. with the grid index or scenario name, and
  /// keeps the dynamic type so callers can rethrow with `throw;`.
  void add_context(const std::string& context) {
    message_ = context + ": " + message_;
  }

 private:
  ErrorCategory category_;
  std::string message_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::validation, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(ErrorCategory::validation,
              line >= 0 ? "line " + std::to_string(line + 1) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Omega(t) below the configured floor where a log-derivative is needed.
class EnvelopeUnderflow : public Error {
 public:
  EnvelopeUnderflow(double t, double omega, double floor)
      : Error(ErrorCategory::numeric,
              "envelope underflow at t=" + std::to_string(t) +
                  " (Omega=" + std::to_string(omega) +
                  ", floor=" + std::to_string(floor) + ")"),
        t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

/// |Omega~'| vanished: complex level crossing, or a singular constant solve.
class DegenerateRabi : public Error {
 public:
  explicit DegenerateRabi(const std::string& what)
      : Error(ErrorCategory::numeric, what) {}
};

class StepSizeUnderflow : public Error {
 public:
  StepSizeUnderflow(double t, double h)
      : Error(ErrorCategory::numeric,
              "integrator step-size underflow at t=" + std::to_string(t) +
                  " (h=" + std::to_string(h) + ")"),
        t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& what)
      : Error(ErrorCategory::validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace nads
