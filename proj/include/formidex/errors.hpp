#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace formidex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: case files, parameter maps, grids, preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Evaluation failed numerically (pole, singular bracket, non-finite data).
/// Carries the Laplace point when one is involved.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
  NumericalError(const std::string& what, std::complex<double> s);

  const std::optional<std::complex<double>>& point() const { return point_; }

 private:
  std::optional<std::complex<double>> point_;
};

}  // namespace formidex
