#pragma once

// System strength kappa = sigma_min(Y_Cl), grid strength
// alpha = sigma_min(B_net) and their lower bounds.

#include <vector>

#include "formidex/forming_index.hpp"
#include "formidex/network.hpp"

namespace formidex {

struct StrengthPoint {
  double kappa = 0.0;
  double alpha = 0.0;
  double bound_kappa = 0.0;
  double bound_alpha = 0.0;
  /// sigma_max of the extra device sensitivity at l_g = 1/B4; NaN without
  /// an extra device.
  double sv_max = 0.0;
  /// Either bound is negative, so the inequality says nothing.
  bool vacuous = false;
};

/// Evaluates one frequency point.
StrengthPoint strength_at(const Network& net, Complex s);

struct StrengthSweep {
  FrequencyGrid grid;
  std::vector<StrengthPoint> points;

  std::vector<double> kappa() const;
  std::vector<double> alpha() const;
  std::vector<double> sv_max() const;
  double min_kappa() const;
  double min_alpha() const;
};

StrengthSweep strength_sweep(const Network& net, const FrequencyGrid& grid);

struct Prop1Report {
  StrengthSweep sweep;
  std::vector<bool> kappa_ok;
  std::vector<bool> alpha_ok;
  /// Bands where the extra device acts grid forming inside the network.
  Classification extra_behavior;

  bool all_satisfied() const;
};

/// Requires an extra device.
Prop1Report prop1_check(const Network& net, const FrequencyGrid& grid);

struct ScenarioComparison {
  StrengthSweep base;
  StrengthSweep other;
  /// other - base, per frequency.
  std::vector<double> delta_kappa;
  std::vector<double> delta_alpha;
  double min_kappa_base = 0.0;
  double min_kappa_other = 0.0;
  double min_alpha_base = 0.0;
  double min_alpha_other = 0.0;
};

/// The cases must retain the same buses in the same order.
ScenarioComparison compare_scenarios(const Network& base, const Network& other,
                                     const FrequencyGrid& grid);

}  // namespace formidex
