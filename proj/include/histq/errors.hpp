#pragma once

#include <stdexcept>
#include <string>

namespace histq {

// Failure classes. The CLI maps each one to a distinct exit code.

class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what, double residual = 0.0)
      : std::invalid_argument(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class SizeError : public std::length_error {
 public:
  explicit SizeError(const std::string& what) : std::length_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace histq
