#pragma once

#include <stdexcept>
#include <string>

namespace tribeam {

/// Input lies outside the physical/mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A requested target value is not attainable; the message reports the attainable range.
class RangeError : public std::range_error {
 public:
  RangeError(const std::string& what, double lo, double hi)
      : std::range_error(what), lo_(lo), hi_(hi) {}
  double attainable_min() const noexcept { return lo_; }
  double attainable_max() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace tribeam
