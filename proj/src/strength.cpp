#include "formidex/strength.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "formidex/errors.hpp"
#include "formidex/parallel.hpp"

namespace formidex {

StrengthPoint strength_at(const Network& net, Complex s) {
  const auto& blocks = net.blocks();
  const Absorbed abs = net.absorb(s);
  const CMatrix y_de = net.device_block(s);
  const CMatrix y_cl = abs.y_net + y_de;

  StrengthPoint p;
  p.kappa = svd_extremes(y_cl).min;
  p.alpha = svd_extremes(abs.b_net).min;

  const double b1_min = svd_extremes(blocks.b1.cast<Complex>()).min;
  if (blocks.has_extra) {
    const RMatrix coupling = blocks.b2 * blocks.b3 / blocks.b4;
    p.sv_max = svd_extremes(abs.s_v).max;
    p.bound_alpha = b1_min - svd_extremes(coupling.cast<Complex>()).max * p.sv_max;
  } else {
    p.sv_max = std::numeric_limits<double>::quiet_NaN();
    p.bound_alpha = b1_min;
  }

  double de_max = 0.0;
  for (Eigen::Index i = 0; i < y_de.rows() / 2; ++i) {
    de_max = std::max(de_max, svd_extremes(y_de.block<2, 2>(2 * i, 2 * i)).max);
  }
  p.bound_kappa = svd_extremes(net.z_inverse(s)).min * p.alpha - de_max;
  p.vacuous = p.bound_kappa < 0.0 || p.bound_alpha < 0.0;
  return p;
}

std::vector<double> StrengthSweep::kappa() const {
  std::vector<double> v;
  for (const auto& p : points) v.push_back(p.kappa);
  return v;
}

std::vector<double> StrengthSweep::alpha() const {
  std::vector<double> v;
  for (const auto& p : points) v.push_back(p.alpha);
  return v;
}

std::vector<double> StrengthSweep::sv_max() const {
  std::vector<double> v;
  for (const auto& p : points) v.push_back(p.sv_max);
  return v;
}

double StrengthSweep::min_kappa() const {
  const auto v = kappa();
  return *std::min_element(v.begin(), v.end());
}

double StrengthSweep::min_alpha() const {
  const auto v = alpha();
  return *std::min_element(v.begin(), v.end());
}

StrengthSweep strength_sweep(const Network& net, const FrequencyGrid& grid) {
  if (grid.size() == 0) throw ConfigError("empty frequency grid");
  StrengthSweep out;
  out.grid = grid;
  out.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { out.points[k] = strength_at(net, grid.s(k)); });
  return out;
}

bool Prop1Report::all_satisfied() const {
  return std::all_of(kappa_ok.begin(), kappa_ok.end(), [](bool b) { return b; }) &&
         std::all_of(alpha_ok.begin(), alpha_ok.end(), [](bool b) { return b; });
}

Prop1Report prop1_check(const Network& net, const FrequencyGrid& grid) {
  if (!net.has_extra()) throw ConfigError("extra_device: bound check needs an extra device");
  Prop1Report r;
  r.sweep = strength_sweep(net, grid);
  for (const auto& p : r.sweep.points) {
    r.kappa_ok.push_back(p.bound_kappa <= p.kappa);
    r.alpha_ok.push_back(p.bound_alpha <= p.alpha);
  }
  r.extra_behavior = classify(grid.points(), r.sweep.sv_max());
  return r;
}

ScenarioComparison compare_scenarios(const Network& base, const Network& other,
                                     const FrequencyGrid& grid) {
  if (base.network_case().retained != other.network_case().retained)
    throw ConfigError("retained: compared cases must retain the same buses in the same order");
  ScenarioComparison c;
  c.base = strength_sweep(base, grid);
  c.other = strength_sweep(other, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    c.delta_kappa.push_back(c.other.points[k].kappa - c.base.points[k].kappa);
    c.delta_alpha.push_back(c.other.points[k].alpha - c.base.points[k].alpha);
  }
  c.min_kappa_base = c.base.min_kappa();
  c.min_kappa_other = c.other.min_kappa();
  c.min_alpha_base = c.base.min_alpha();
  c.min_alpha_other = c.other.min_alpha();
  return c;
}

}  // namespace formidex
