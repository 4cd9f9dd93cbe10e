#include "formidex/forming_index.hpp"

#include <cmath>

#include "formidex/errors.hpp"
#include "formidex/parallel.hpp"

namespace formidex {

Mat2 sensitivity(const AdmittanceModel& y, const LineParams& line, Complex s) {
  if (line.l_g == 0.0) return Mat2::Identity();
  const Mat2 bracket = Mat2::Identity() + line.l_g * eval_z(s, line.tau, line.omega0) * y(s);
  if (!all_finite(bracket)) throw NumericalError("non-finite sensitivity bracket", s);
  if (condition_number(bracket) > 1e12) throw NumericalError("sensitivity bracket is singular", s);
  return bracket.inverse();
}

SensitivityModel::SensitivityModel(AdmittanceModel y, LineParams line)
    : y_(std::move(y)), line_(line) {
  line_.validate();
}

SweepResult forming_index_sweep(const AdmittanceModel& model, const LineParams& line,
                                const FrequencyGrid& grid) {
  line.validate();
  if (grid.size() == 0) throw ConfigError("empty frequency grid");
  SweepResult out;
  out.grid = grid;
  out.spec = model.spec();
  out.line = line;
  out.fi.assign(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t k) {
    out.fi[k] = svd_extremes(sensitivity(model, line, grid.s(k))).max;
  });
  return out;
}

SweepResult forming_index_sweep(const ConverterSpec& spec, const LineParams& line,
                                const FrequencyGrid& grid) {
  return forming_index_sweep(build_admittance(spec, line.omega0), line, grid);
}

std::string_view to_string(Behavior b) {
  return b == Behavior::GridForming ? "GFM" : "GFL";
}

Classification classify(const std::vector<double>& f_hz, const std::vector<double>& fi) {
  if (f_hz.empty() || f_hz.size() != fi.size())
    throw ConfigError("classification needs a non-empty sweep with matching lengths");
  Classification out;
  Band current{f_hz.front(), f_hz.front(), behavior_of(fi.front())};
  for (std::size_t k = 1; k < f_hz.size(); ++k) {
    const Behavior next = behavior_of(fi[k]);
    if (next != current.label) {
      const double t = (1.0 - fi[k - 1]) / (fi[k] - fi[k - 1]);
      const double lo = std::log(f_hz[k - 1]);
      const double hi = std::log(f_hz[k]);
      const double x = std::exp(lo + t * (hi - lo));
      out.crossovers.push_back(x);
      current.f_high = x;
      out.bands.push_back(current);
      current = Band{x, x, next};
    }
  }
  current.f_high = f_hz.back();
  out.bands.push_back(current);
  return out;
}

}  // namespace formidex
