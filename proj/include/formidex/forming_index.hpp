#pragma once

// Device sensitivity to grid-voltage perturbations behind a test line, and
// the Forming Index FI(w) = sigma_max[S_v(jw)].

#include <string_view>
#include <vector>

#include "formidex/converter.hpp"
#include "formidex/tfcore.hpp"

namespace formidex {

/// S_v(s) = [I + l_g Z(s) Y(s)]^-1. Throws NumericalError when the bracket
/// is singular at s.
Mat2 sensitivity(const AdmittanceModel& y, const LineParams& line, Complex s);

class SensitivityModel {
 public:
  SensitivityModel(AdmittanceModel y, LineParams line);

  Mat2 operator()(Complex s) const { return sensitivity(y_, line_, s); }
  const AdmittanceModel& admittance() const { return y_; }
  const LineParams& line() const { return line_; }

 private:
  AdmittanceModel y_;
  LineParams line_;
};

struct SweepResult {
  FrequencyGrid grid;
  std::vector<double> fi;
  ConverterSpec spec;
  LineParams line;
};

SweepResult forming_index_sweep(const ConverterSpec& spec, const LineParams& line,
                                const FrequencyGrid& grid);
/// Same, for an already built model (custom devices).
SweepResult forming_index_sweep(const AdmittanceModel& model, const LineParams& line,
                                const FrequencyGrid& grid);

enum class Behavior { GridForming, GridFollowing };

std::string_view to_string(Behavior b);

/// FI <= 1 is grid forming.
inline Behavior behavior_of(double fi) {
  return fi <= 1.0 ? Behavior::GridForming : Behavior::GridFollowing;
}

struct Band {
  double f_low = 0.0;
  double f_high = 0.0;
  Behavior label = Behavior::GridForming;
};

struct Classification {
  std::vector<Band> bands;
  std::vector<double> crossovers;
};

/// Bands over [f_min, f_max]; crossovers interpolated linearly in
/// (log f, FI) between neighbours with different labels.
Classification classify(const std::vector<double>& f_hz, const std::vector<double>& fi);
inline Classification classify(const SweepResult& sweep) {
  return classify(sweep.grid.points(), sweep.fi);
}

}  // namespace formidex
