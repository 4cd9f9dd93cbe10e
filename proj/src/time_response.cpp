#include "formidex/time_response.hpp"

#include <cmath>
#include <unsupported/Eigen/FFT>

#include "formidex/errors.hpp"
#include "formidex/parallel.hpp"

namespace formidex {

namespace {

constexpr int kFitPoints = 5;

struct Asymptote {
  Eigen::VectorXcd d;
  Eigen::VectorXcd f0;
  Eigen::VectorXcd c;

  Eigen::VectorXcd operator()(Complex s) const { return d + f0 / s + c / (s * s); }
};

/// Polynomial fit in 1/s through real points lambda * 2^i.
Asymptote fit_asymptote(const VectorLaplace& f, Eigen::Index dim, double lambda) {
  Eigen::MatrixXd v(kFitPoints, kFitPoints);
  Eigen::MatrixXcd rhs(kFitPoints, dim);
  for (int i = 0; i < kFitPoints; ++i) {
    const double s = lambda * std::ldexp(1.0, i);
    const double u = lambda / s;
    for (int j = 0; j < kFitPoints; ++j) v(i, j) = std::pow(u, j);
    const Eigen::VectorXcd fs = f(Complex(s, 0.0));
    if (fs.size() != dim || !all_finite(fs)) throw NumericalError("non-finite transform sample", s);
    rhs.row(i) = fs.transpose();
  }
  const Eigen::MatrixXcd coef = v.cast<Complex>().partialPivLu().solve(rhs);
  Asymptote a;
  a.d = coef.row(0).transpose();
  a.f0 = coef.row(1).transpose() * lambda;
  a.c = coef.row(2).transpose() * (lambda * lambda);
  return a;
}

}  // namespace

IltResult ilt_bromwich(const VectorLaplace& f, Eigen::Index dim, double t_end, int n_samples,
                       const IltOptions& opt) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be > 0");
  if (n_samples < 2) throw ConfigError("n_samples must be >= 2");
  if (!(opt.a_damp > 0.0)) throw ConfigError("a_damp must be > 0");
  if (opt.harmonics_per_sample < 1) throw ConfigError("harmonics_per_sample must be >= 1");
  if (!(opt.t_shift >= 0.0) || !(opt.t_shift < t_end)) throw ConfigError("t_shift must lie in [0, t_end)");

  const double period = t_end;  // half period of the Fourier series
  const double sigma = opt.a_damp / (2.0 * period);
  const std::size_t n_harm = static_cast<std::size_t>(opt.harmonics_per_sample) * n_samples;
  const double w_step = std::numbers::pi / period;
  const Asymptote asym = fit_asymptote(f, dim, 10.0 * w_step * static_cast<double>(n_harm));

  Eigen::MatrixXcd coef(static_cast<Eigen::Index>(n_harm), dim);
  parallel_for(n_harm, [&](std::size_t k) {
    const Complex s(sigma, w_step * static_cast<double>(k));
    const Eigen::VectorXcd fs = f(s);
    if (fs.size() != dim || !all_finite(fs)) throw NumericalError("non-finite transform sample", s);
    Eigen::VectorXcd r = fs - asym(s);
    if (opt.t_shift > 0.0) r *= std::exp(-s * opt.t_shift);
    if (k == 0) r *= 0.5;
    coef.row(static_cast<Eigen::Index>(k)) = r.transpose();
  });

  // fold harmonics onto the sample grid: exp(i k pi t_j / T) has period 2 n_samples in k
  const std::size_t bins = 2 * static_cast<std::size_t>(n_samples);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);

  IltResult out;
  out.t.resize(n_samples + 1);
  for (int j = 0; j <= n_samples; ++j) out.t[j] = period * j / n_samples;
  out.values = RMatrix::Zero(n_samples + 1, dim);
  out.impulse = asym.d.real();

  std::vector<Complex> folded(bins), series(bins);
  for (Eigen::Index m = 0; m < dim; ++m) {
    std::fill(folded.begin(), folded.end(), Complex(0.0, 0.0));
    for (std::size_t k = 0; k < n_harm; ++k) folded[k % bins] += coef(static_cast<Eigen::Index>(k), m);
    fft.inv(series, folded);
    for (int j = 0; j <= n_samples; ++j) {
      const double t = out.t[j];
      if (t < opt.t_shift) continue;
      const double tail = std::exp(sigma * t) / period * series[j].real();
      const double since = t - opt.t_shift;
      out.values(j, m) = tail + asym.f0(m).real() + asym.c(m).real() * since;
    }
  }
  return out;
}

std::vector<double> ilt_bromwich(const std::function<Complex(Complex)>& f, double t_end,
                                 int n_samples, const IltOptions& opt) {
  auto vf = [&](Complex s) {
    Eigen::VectorXcd v(1);
    v(0) = f(s);
    return v;
  };
  const IltResult r = ilt_bromwich(vf, 1, t_end, n_samples, opt);
  return {r.values.col(0).data(), r.values.col(0).data() + r.values.rows()};
}

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::D: return "d";
    case Axis::Q: return "q";
    case Axis::Both: return "both";
  }
  return "d";
}

Axis parse_axis(std::string_view name) {
  if (name == "d") return Axis::D;
  if (name == "q") return Axis::Q;
  if (name == "both") return Axis::Both;
  throw ConfigError("axis must be d, q or both");
}

Eigen::VectorXcd voltage_transfer(const Network& net, const Eigen::VectorXcd& injection, Complex s) {
  const auto n = static_cast<Eigen::Index>(net.n());
  const Eigen::Index total = net.has_extra() ? 2 * n + 2 : 2 * n;
  if (injection.size() != total) throw ConfigError("injection vector has the wrong size");

  const bool at_extra = net.has_extra() && injection.tail(2).cwiseAbs().maxCoeff() > 0.0;
  Eigen::VectorXcd u;
  if (at_extra) {
    const CMatrix sys = net.full_system(s);
    u = sys.partialPivLu().solve(injection);
  } else {
    const CMatrix y_cl = net.closed_loop(s);
    u.resize(total);
    u.head(2 * n) = y_cl.partialPivLu().solve(injection.head(2 * n));
    if (net.has_extra()) {
      const auto& b = net.blocks();
      const Mat2 zi = net.z_inverse(s);
      const Mat2 bracket = b.b4 * zi + (*net.extra())(s);
      const Eigen::Vector2cd coupled = kron_block(b.b3, zi) * u.head(2 * n);
      u.tail(2) = -bracket.partialPivLu().solve(coupled);
    }
  }
  if (!all_finite(u)) throw NumericalError("closed-loop system is singular", s);
  return u;
}

TimeSeries step_response(const Network& net, const DisturbanceSpec& dist, const StepOptions& opt) {
  const auto& c = net.network_case();
  const std::vector<int> buses = c.output_buses();
  Eigen::Index slot = -1;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i] == dist.bus) slot = static_cast<Eigen::Index>(i);
  }
  if (slot < 0) throw ConfigError("bus: " + std::to_string(dist.bus) + " is not a device bus of the case");
  if (!std::isfinite(dist.amplitude)) throw ConfigError("amplitude must be finite");
  if (!(opt.t_end > 0.0) || !std::isfinite(opt.t_end)) throw ConfigError("t_end must be > 0");
  if (!(dist.t_step >= 0.0) || !(dist.t_step < opt.t_end))
    throw ConfigError("t_step must lie in [0, t_end)");
  if (opt.n_samples < 2) throw ConfigError("n_samples must be >= 2");

  const auto nb = static_cast<Eigen::Index>(buses.size());
  Eigen::VectorXcd inj = Eigen::VectorXcd::Zero(2 * nb);
  switch (dist.axis) {
    case Axis::D: inj(2 * slot) = dist.amplitude; break;
    case Axis::Q: inj(2 * slot + 1) = dist.amplitude; break;
    case Axis::Both:
      inj(2 * slot) = dist.amplitude / std::sqrt(2.0);
      inj(2 * slot + 1) = dist.amplitude / std::sqrt(2.0);
      break;
  }

  TimeSeries ts;
  ts.buses = buses;
  ts.final_ud = Eigen::VectorXd::Zero(nb);
  ts.final_uq = Eigen::VectorXd::Zero(nb);
  const int ns = opt.n_samples;
  if (dist.amplitude == 0.0) {
    ts.t.resize(ns + 1);
    for (int j = 0; j <= ns; ++j) ts.t[j] = opt.t_end * j / ns;
    ts.ud = ts.uq = ts.norm = RMatrix::Zero(ns + 1, nb);
    return ts;
  }

  auto transform = [&](Complex s) -> Eigen::VectorXcd { return voltage_transfer(net, inj, s) / s; };
  IltOptions io;
  io.a_damp = opt.a_damp;
  io.t_shift = dist.t_step;
  const IltResult r = ilt_bromwich(transform, 2 * nb, opt.t_end, ns, io);

  ts.t = r.t;
  ts.ud.resize(ns + 1, nb);
  ts.uq.resize(ns + 1, nb);
  ts.norm.resize(ns + 1, nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    ts.ud.col(b) = r.values.col(2 * b);
    ts.uq.col(b) = r.values.col(2 * b + 1);
    ts.norm.col(b) = (ts.ud.col(b).array().square() + ts.uq.col(b).array().square()).sqrt();
  }
  ts.impulse_norm = r.impulse.norm();

  const Eigen::VectorXcd fv = voltage_transfer(net, inj, Complex(1e-6 * c.omega0, 0.0));
  Eigen::VectorXd diff(2 * nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    ts.final_ud(b) = fv(2 * b).real();
    ts.final_uq(b) = fv(2 * b + 1).real();
    diff(2 * b) = ts.ud(ns, b) - ts.final_ud(b);
    diff(2 * b + 1) = ts.uq(ns, b) - ts.final_uq(b);
  }
  const double ref = fv.real().norm();
  if (ref > 0.0) {
    ts.final_value_error = diff.norm() / ref;
    ts.final_value_ok = ts.final_value_error <= kFinalValueRtol;
  } else {
    ts.final_value_error = diff.norm();
    ts.final_value_ok = ts.final_value_error <= 1e-12;
  }
  return ts;
}

}  // namespace formidex
