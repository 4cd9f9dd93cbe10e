#pragma once

// Small-signal dq admittance surrogates for converter control strategies.
//
// Sign convention: Y(s) maps the terminal-voltage perturbation to the current
// absorbed by the device (load convention), dI_abs = Y(s) dU. Each strategy
// is first written as
//
//     dI_out = A(s) dU + B(s) dI_out        (dI_out = -dI_abs)
//
// where the B block collects the current feedback through the measured
// powers; closing the loop gives Y(s) = -(I - B(s))^-1 A(s).

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "formidex/tfcore.hpp"

namespace formidex {

struct OperatingPoint {
  double ud = 1.0;
  double uq = 0.0;
  /// Output current, converter towards grid.
  double id = 0.5;
  double iq = 0.0;

  double voltage_magnitude() const;
  /// Rejects a zero terminal voltage.
  void validate() const;
};

struct FilterParams {
  double l_f = 0.1;
  double r_f = 0.01;
};

enum class Strategy {
  Droop,
  Vsg,
  Voc,
  Vfc,
  PllPq,
  PllPv,
  PllGfm,
  IdealSource,
  StaticAdmittance,
  Custom,
};

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);
/// The seven control strategies compared in the forming-index study.
const std::vector<Strategy>& control_strategies();

using ParamMap = std::map<std::string, double, std::less<>>;

/// Default parameter map of a strategy, including the output filter.
ParamMap default_params(Strategy s);

/// Merges overrides into the defaults. Unknown names and out-of-range values
/// raise ConfigError naming the parameter.
ParamMap resolve_params(Strategy s, const ParamMap& overrides);

using CustomEvaluator = std::function<Mat2(Complex)>;

struct ConverterSpec {
  Strategy strategy = Strategy::Droop;
  /// Fully resolved parameter map (see resolve_params).
  ParamMap params = default_params(Strategy::Droop);
  OperatingPoint op;
  /// Only for Strategy::Custom.
  CustomEvaluator custom;

  static ConverterSpec make(Strategy s, const ParamMap& overrides = {}, OperatingPoint op = {});
  static ConverterSpec make_custom(CustomEvaluator eval);

  FilterParams filter() const;
  double param(std::string_view name) const;
};

/// Bilinear linearisation of P = Ud Id + Uq Iq and Q = Uq Id - Ud Iq.
/// Rows are over [dUd, dUq, dId, dIq].
struct PowerJacobians {
  Eigen::RowVector4d p;
  Eigen::RowVector4d q;

  /// Voltage part: rows (P, Q), columns (dUd, dUq).
  Eigen::Matrix2d voltage_block() const;
  /// Current part: rows (P, Q), columns (dId, dIq).
  Eigen::Matrix2d current_block() const;
};

PowerJacobians linearize_power(const OperatingPoint& op);

struct EliminationBlocks {
  Mat2 a;
  Mat2 b;
};

/// A(s), B(s) of a strategy at s. Not defined for StaticAdmittance and Custom,
/// whose admittance is given directly.
EliminationBlocks elimination_blocks(const ConverterSpec& spec, double omega0, Complex s);

/// Evaluator s -> Y(s). Cheap to copy; the spec is shared.
class AdmittanceModel {
 public:
  AdmittanceModel(ConverterSpec spec, double omega0);

  /// Throws NumericalError at controller poles (s = 0 for strategies with
  /// integrators) and when the loop elimination is ill-conditioned.
  Mat2 operator()(Complex s) const;

  const ConverterSpec& spec() const { return *spec_; }
  double omega0() const { return omega0_; }
  double scale() const { return scale_; }
  /// Same model with every admittance entry multiplied by c.
  AdmittanceModel scaled(double c) const;

 private:
  std::shared_ptr<const ConverterSpec> spec_;
  double omega0_;
  double scale_ = 1.0;
};

/// Validates the spec (parameters, operating point) and returns its model.
AdmittanceModel build_admittance(const ConverterSpec& spec, double omega0 = kDefaultOmega0);

inline Mat2 eval_admittance(const AdmittanceModel& model, Complex s) { return model(s); }

/// Largest elimination condition number accepted before a point is treated as
/// a pole.
inline constexpr double kMaxEliminationCondition = 1e12;

}  // namespace formidex
