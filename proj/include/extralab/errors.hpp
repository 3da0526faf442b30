#pragma once

#include <stdexcept>
#include <string>

namespace extralab {

// Bad argument or dimension mismatch at an API boundary.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix or config failed a structural check (symmetry, PSD, enum value).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingError : public std::runtime_error {
 public:
  SamplingError(const std::string& what, int agents, double param)
      : std::runtime_error(what), agents_(agents), param_(param) {}
  int agents() const { return agents_; }
  double param() const { return param_; }

 private:
  int agents_;
  double param_;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long iteration, double norm)
      : std::runtime_error(what), iteration_(iteration), norm_(norm) {}
  long iteration() const { return iteration_; }
  double norm() const { return norm_; }

 private:
  long iteration_;
  double norm_;
};

class ReferenceSolveError : public std::runtime_error {
 public:
  ReferenceSolveError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class DualRecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config file problems; carries the offending field path when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace extralab
