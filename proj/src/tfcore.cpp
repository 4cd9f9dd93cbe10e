#include "formidex/tfcore.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "formidex/errors.hpp"

namespace formidex {

NumericalError::NumericalError(const std::string& what, std::complex<double> s)
    : Error([&] {
        std::ostringstream os;
        os.precision(9);
        os << what << " at s = " << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "j";
        return os.str();
      }()),
      point_(s) {}

void LineParams::validate() const {
  if (!(l_g >= 0.0) || !std::isfinite(l_g)) throw ConfigError("line l_g must be >= 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("line tau must be >= 0");
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("line omega0 must be > 0");
}

FrequencyGrid::FrequencyGrid(std::vector<double> hz) : hz_(std::move(hz)) {
  if (hz_.size() < 2) throw ConfigError("frequency grid needs at least 2 points");
  for (std::size_t k = 0; k < hz_.size(); ++k) {
    if (!(hz_[k] > 0.0) || !std::isfinite(hz_[k]))
      throw ConfigError("frequency grid points must be finite and > 0");
    if (k > 0 && !(hz_[k] > hz_[k - 1]))
      throw ConfigError("frequency grid must be strictly increasing");
  }
}

FrequencyGrid make_freq_grid(double fmin_hz, double fmax_hz, int n_points) {
  if (!(fmin_hz > 0.0) || !(fmax_hz > fmin_hz) || !std::isfinite(fmax_hz))
    throw ConfigError("frequency grid requires 0 < fmin < fmax");
  if (n_points < 2) throw ConfigError("frequency grid requires n_points >= 2");
  std::vector<double> hz(static_cast<std::size_t>(n_points));
  const double lo = std::log10(fmin_hz);
  const double hi = std::log10(fmax_hz);
  for (int k = 0; k < n_points; ++k) {
    hz[k] = std::pow(10.0, lo + (hi - lo) * k / (n_points - 1));
  }
  // pin the endpoints exactly
  hz.front() = fmin_hz;
  hz.back() = fmax_hz;
  return FrequencyGrid(std::move(hz));
}

FrequencyGrid default_freq_grid() { return make_freq_grid(0.01, 1000.0, 400); }

Mat2 eval_z(Complex s, double tau, double omega0) {
  const Complex a = s / omega0 + tau;
  Mat2 z;
  z << a, -1.0, 1.0, a;
  return z;
}

Mat2 eval_z_inverse(Complex s, double tau, double omega0) {
  const Complex a = s / omega0 + tau;
  const Complex det = a * a + 1.0;
  if (std::abs(det) == 0.0) throw NumericalError("line form is singular", s);
  Mat2 zi;
  zi << a, 1.0, -1.0, a;
  return zi / det;
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex v = m.data()[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

SingularExtremes svd_extremes(const CMatrix& m) {
  if (m.size() == 0) throw ConfigError("singular values of an empty matrix");
  if (!all_finite(m)) throw NumericalError("non-finite matrix passed to SVD");
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  SingularExtremes out;
  out.max = sv(0);
  out.min = sv(sv.size() - 1);
  return out;
}

double condition_number(const CMatrix& m) {
  const auto ex = svd_extremes(m);
  if (ex.min == 0.0) return std::numeric_limits<double>::infinity();
  return ex.max / ex.min;
}

CMatrix kron_block(const RMatrix& b, const Mat2& m) {
  CMatrix out(2 * b.rows(), 2 * b.cols());
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
      out.block<2, 2>(2 * i, 2 * k) = b(i, k) * m;
    }
  }
  return out;
}

Eigen::Matrix2d rotation(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Eigen::Matrix2d rotation_generator() {
  Eigen::Matrix2d j;
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

}  // namespace formidex
