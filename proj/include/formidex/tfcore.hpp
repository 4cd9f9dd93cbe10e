#pragma once

// Numerical backbone: dq line form, Kronecker blocks, singular-value
// extremes and frequency grids. Every Laplace variable in the library is in
// absolute rad/s; normalisation by the base frequency happens here.

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace formidex {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// 60 Hz base.
inline constexpr double kDefaultOmega0 = kTwoPi * 60.0;

struct LineParams {
  double l_g = 0.3;
  double tau = 0.1;
  double omega0 = kDefaultOmega0;

  /// Throws ConfigError. A zero inductance is accepted (S_v degenerates to I).
  void validate() const;
};

/// Strictly increasing positive frequencies in Hz.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  /// Validates the points; throws ConfigError.
  explicit FrequencyGrid(std::vector<double> hz);

  std::size_t size() const { return hz_.size(); }
  double hz(std::size_t k) const { return hz_[k]; }
  const std::vector<double>& points() const { return hz_; }
  /// s = j 2 pi f.
  Complex s(std::size_t k) const { return {0.0, kTwoPi * hz_[k]}; }

 private:
  std::vector<double> hz_;
};

/// Log-spaced grid with both endpoints.
FrequencyGrid make_freq_grid(double fmin_hz, double fmax_hz, int n_points);

/// 400 points over 0.01 Hz - 1 kHz.
FrequencyGrid default_freq_grid();

/// [[s/w0 + tau, -1], [1, s/w0 + tau]]
Mat2 eval_z(Complex s, double tau, double omega0);

/// Inverse of eval_z in closed form; Z is of the form aI + J so
/// Z^-1 = (aI - J) / (a^2 + 1).
Mat2 eval_z_inverse(Complex s, double tau, double omega0);

struct SingularExtremes {
  double max = 0.0;
  double min = 0.0;
};

/// Largest and smallest singular value. Throws NumericalError on
/// non-finite input.
SingularExtremes svd_extremes(const CMatrix& m);

/// Kronecker product B (x) M.
CMatrix kron_block(const RMatrix& b, const Mat2& m);

/// Ratio of extreme singular values; +inf for singular matrices.
double condition_number(const CMatrix& m);

bool all_finite(const CMatrix& m);

/// Rotation by angle theta in the dq plane.
Eigen::Matrix2d rotation(double theta);

/// J = [[0, -1], [1, 0]].
Eigen::Matrix2d rotation_generator();

}  // namespace formidex
