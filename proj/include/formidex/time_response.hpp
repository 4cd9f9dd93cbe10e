#pragma once

// Numerical inverse Laplace transform on a damped Fourier contour and the
// network step response built on it.

#include <functional>
#include <string_view>
#include <vector>

#include "formidex/network.hpp"

namespace formidex {

struct IltOptions {
  /// Contour shift sigma = a_damp / (2 t_end); aliasing is ~exp(-a_damp).
  double a_damp = 18.4;
  /// Harmonics per output sample.
  int harmonics_per_sample = 4;
  /// Shifts the inverted signal right by this many seconds; samples before
  /// it are exactly zero.
  double t_shift = 0.0;
};

using VectorLaplace = std::function<Eigen::VectorXcd(Complex)>;

struct IltResult {
  /// t_j = j t_end / n_samples, j = 0..n_samples.
  std::vector<double> t;
  /// One row per sample, one column per component.
  RMatrix values;
  /// Constant high-frequency limit of F (an impulse in time), removed
  /// before inversion.
  Eigen::VectorXd impulse;
};

/// Inverts a vector-valued F of fixed dimension. The high-frequency
/// asymptote D + f0/s + c/s^2 is fitted on the real axis and inverted
/// analytically (f0 + c t); the remainder goes through the Fourier series.
IltResult ilt_bromwich(const VectorLaplace& f, Eigen::Index dim, double t_end, int n_samples,
                       const IltOptions& opt = {});

/// Scalar convenience form; returns f(t_j), j = 0..n_samples.
std::vector<double> ilt_bromwich(const std::function<Complex(Complex)>& f, double t_end,
                                 int n_samples, const IltOptions& opt = {});

enum class Axis { D, Q, Both };

std::string_view to_string(Axis a);
Axis parse_axis(std::string_view name);

struct DisturbanceSpec {
  int bus = 0;
  double amplitude = 1.0;
  /// Both splits the amplitude equally so that |dI| = amplitude.
  Axis axis = Axis::D;
  double t_step = 0.5;
};

struct StepOptions {
  double t_end = 2.0;
  int n_samples = 2000;
  double a_damp = 18.4;
};

struct TimeSeries {
  std::vector<double> t;
  /// Retained buses then the extra bus.
  std::vector<int> buses;
  /// Rows are samples, columns are buses.
  RMatrix ud;
  RMatrix uq;
  RMatrix norm;
  /// Steady state from the transfer at s = 1e-6 omega0.
  Eigen::VectorXd final_ud;
  Eigen::VectorXd final_uq;
  double final_value_error = 0.0;
  bool final_value_ok = true;
  /// Norm of the dropped impulsive part.
  double impulse_norm = 0.0;
};

/// Relative tolerance of the final-value check.
inline constexpr double kFinalValueRtol = 0.01;

/// Voltage response to a current step injected at dist.bus. Disturbances at
/// retained buses go through the reduced closed-loop matrix, the extra bus
/// voltage is recovered from the eliminated row; a disturbance at the extra
/// bus is solved on the unreduced system.
TimeSeries step_response(const Network& net, const DisturbanceSpec& dist, const StepOptions& opt = {});

/// Bus voltages over output buses for an injected current vector (same
/// ordering) at s. Uses the unreduced system when the injection touches the
/// extra bus.
Eigen::VectorXcd voltage_transfer(const Network& net, const Eigen::VectorXcd& injection, Complex s);

}  // namespace formidex
