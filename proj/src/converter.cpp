#include "formidex/converter.hpp"

#include <cmath>
#include <sstream>

#include "formidex/errors.hpp"

namespace formidex {

namespace {

struct ParamRule {
  const char* name;
  double value;
  bool zero_allowed;
};

constexpr double kOmegaF = kTwoPi * 5.0;

const std::vector<ParamRule>& rules(Strategy s) {
  static const std::vector<ParamRule> droop = {
      {"l_f", 0.1, false}, {"r_f", 0.01, true}, {"m_p", 0.05, false},
      {"m_q", 0.05, false}, {"omega_f", kOmegaF, false}};
  static const std::vector<ParamRule> vsg = {
      {"l_f", 0.1, false}, {"r_f", 0.01, true}, {"t_j", 4.0, false},
      {"d_p", 20.0, false}, {"m_q", 0.05, false}, {"omega_f", kOmegaF, false}};
  static const std::vector<ParamRule> voc = {
      {"l_f", 0.1, false}, {"r_f", 0.01, true},  {"m_p", 0.05, false},
      {"omega_f", kOmegaF, false}, {"eta", 0.05, false}, {"alpha", 10.0, false}};
  static const std::vector<ParamRule> vfc = {
      {"l_f", 0.1, false}, {"r_f", 0.01, true}, {"m_p", 0.05, false}};
  static const std::vector<ParamRule> pll_pq = {
      {"l_f", 0.1, false},     {"r_f", 0.01, true},     {"k_p", 0.25, false},
      {"k_i", 50.0, false},    {"k_p_pll", 0.2, false}, {"k_i_pll", 42.0, false},
      {"omega_i", kTwoPi * 300.0, false}, {"omega_m", kTwoPi * 20.0, false}};
  static const std::vector<ParamRule> pll_pv = {
      {"l_f", 0.1, false},     {"r_f", 0.01, true},     {"k_p", 0.25, false},
      {"k_i", 50.0, false},    {"k_p_v", 0.25, false},  {"k_i_v", 50.0, false},
      {"k_p_pll", 0.2, false}, {"k_i_pll", 42.0, false},
      {"omega_i", kTwoPi * 300.0, false}, {"omega_m", kTwoPi * 20.0, false}};
  static const std::vector<ParamRule> pll_gfm = {
      {"l_f", 0.1, false},     {"r_f", 0.01, true},      {"m_p", 0.05, false},
      {"m_q", 0.05, false},    {"omega_f", kOmegaF, false}, {"k_p_pll", 0.2, false},
      {"k_i_pll", 42.0, false}, {"omega_i", kTwoPi * 300.0, false}};
  static const std::vector<ParamRule> ideal = {{"l_f", 0.1, false}, {"r_f", 0.01, true}};
  static const std::vector<ParamRule> stat = {{"g", 1.0, true}};
  static const std::vector<ParamRule> none = {};
  switch (s) {
    case Strategy::Droop: return droop;
    case Strategy::Vsg: return vsg;
    case Strategy::Voc: return voc;
    case Strategy::Vfc: return vfc;
    case Strategy::PllPq: return pll_pq;
    case Strategy::PllPv: return pll_pv;
    case Strategy::PllGfm: return pll_gfm;
    case Strategy::IdealSource: return ideal;
    case Strategy::StaticAdmittance: return stat;
    case Strategy::Custom: return none;
  }
  return none;
}

bool has_integrator(Strategy s) {
  switch (s) {
    case Strategy::IdealSource:
    case Strategy::StaticAdmittance:
    case Strategy::Custom:
      return false;
    default:
      return true;
  }
}

/// Output filter admittance G_f(s) = [l_f Z_{r_f/l_f}(s)]^-1.
Mat2 filter_admittance(const FilterParams& f, double omega0, Complex s) {
  return eval_z_inverse(s, f.r_f / f.l_f, omega0) / f.l_f;
}

Complex low_pass(double omega, Complex s) { return omega / (s + omega); }

/// Closed PLL: d(theta_pll) = hp(s) * n^T dU with n the unit vector normal to
/// the steady-state terminal voltage.
struct PllResponse {
  Complex hp;
  Eigen::RowVector2d n;
};

PllResponse pll_response(const ConverterSpec& spec, double omega0, Complex s) {
  const auto& op = spec.op;
  const double umag = op.voltage_magnitude();
  const double kp = spec.param("k_p_pll");
  const double ki = spec.param("k_i_pll");
  const Complex num = omega0 * (kp * s + ki);
  PllResponse r;
  r.hp = num / (s * s + umag * num);
  r.n << -op.uq / umag, op.ud / umag;
  return r;
}

/// Steady-state internal EMF behind the filter, U0 + l_f Z_f(0) I0.
Eigen::Vector2d internal_emf(const ConverterSpec& spec) {
  const auto f = spec.filter();
  const auto& op = spec.op;
  return {op.ud + f.r_f * op.id - f.l_f * op.iq, op.uq + f.l_f * op.id + f.r_f * op.iq};
}

/// Map from (dP, dQ) to the droop-family internal EMF perturbation in the
/// global frame: dE_dq = R(theta_E0) [dE, |E0| dtheta].
Mat2 droop_emf_map(const ConverterSpec& spec, double omega0, Complex s) {
  Complex g_theta;  // dtheta per dP
  Complex g_mag;    // dE per dQ
  switch (spec.strategy) {
    case Strategy::Droop:
    case Strategy::PllGfm: {
      const Complex lp = low_pass(spec.param("omega_f"), s);
      g_theta = -omega0 * spec.param("m_p") * lp / s;
      g_mag = -spec.param("m_q") * lp;
      break;
    }
    case Strategy::Vsg: {
      g_theta = -omega0 / (s * (spec.param("t_j") * s + spec.param("d_p")));
      g_mag = -spec.param("m_q") * low_pass(spec.param("omega_f"), s);
      break;
    }
    case Strategy::Voc: {
      const double eta = spec.param("eta");
      g_theta = -omega0 * spec.param("m_p") * low_pass(spec.param("omega_f"), s) / s;
      g_mag = -eta / (s + eta * spec.param("alpha"));
      break;
    }
    case Strategy::Vfc: {
      g_theta = -omega0 * spec.param("m_p") / s;
      g_mag = 0.0;
      break;
    }
    default:
      throw ConfigError("strategy has no droop reference");
  }
  const Eigen::Vector2d e0 = internal_emf(spec);
  const double e0_mag = e0.norm();
  Mat2 k;
  k << 0.0, g_mag, e0_mag * g_theta, 0.0;
  return rotation(std::atan2(e0(1), e0(0))).cast<Complex>() * k;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Droop: return "droop";
    case Strategy::Vsg: return "vsg";
    case Strategy::Voc: return "voc";
    case Strategy::Vfc: return "vfc";
    case Strategy::PllPq: return "pll_pq";
    case Strategy::PllPv: return "pll_pv";
    case Strategy::PllGfm: return "pll_gfm";
    case Strategy::IdealSource: return "ideal_source";
    case Strategy::StaticAdmittance: return "static_admittance";
    case Strategy::Custom: return "custom";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (auto s : {Strategy::Droop, Strategy::Vsg, Strategy::Voc, Strategy::Vfc, Strategy::PllPq,
                 Strategy::PllPv, Strategy::PllGfm, Strategy::IdealSource,
                 Strategy::StaticAdmittance, Strategy::Custom}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

const std::vector<Strategy>& control_strategies() {
  static const std::vector<Strategy> all = {Strategy::Droop, Strategy::Vsg,   Strategy::Voc,
                                            Strategy::Vfc,   Strategy::PllPq, Strategy::PllPv,
                                            Strategy::PllGfm};
  return all;
}

ParamMap default_params(Strategy s) {
  ParamMap out;
  for (const auto& r : rules(s)) out.emplace(r.name, r.value);
  return out;
}

ParamMap resolve_params(Strategy s, const ParamMap& overrides) {
  ParamMap out = default_params(s);
  for (const auto& [name, value] : overrides) {
    auto it = out.find(name);
    if (it == out.end()) {
      throw ConfigError("unknown parameter '" + name + "' for strategy " + std::string(to_string(s)));
    }
    it->second = value;
  }
  for (const auto& r : rules(s)) {
    const double v = out.at(r.name);
    const bool ok = std::isfinite(v) && (r.zero_allowed ? v >= 0.0 : v > 0.0);
    if (!ok) {
      throw ConfigError("parameter '" + std::string(r.name) + "' of " + std::string(to_string(s)) +
                        (r.zero_allowed ? " must be >= 0" : " must be > 0"));
    }
  }
  return out;
}

double OperatingPoint::voltage_magnitude() const { return std::hypot(ud, uq); }

void OperatingPoint::validate() const {
  if (!std::isfinite(ud) || !std::isfinite(uq) || !std::isfinite(id) || !std::isfinite(iq))
    throw ConfigError("operating point must be finite");
  if (!(voltage_magnitude() > 0.0))
    throw ConfigError("operating point voltage must be non-zero");
}

ConverterSpec ConverterSpec::make(Strategy s, const ParamMap& overrides, OperatingPoint op) {
  if (s == Strategy::Custom) throw ConfigError("custom devices need an evaluator");
  ConverterSpec spec;
  spec.strategy = s;
  spec.params = resolve_params(s, overrides);
  spec.op = op;
  return spec;
}

ConverterSpec ConverterSpec::make_custom(CustomEvaluator eval) {
  if (!eval) throw ConfigError("custom device evaluator is empty");
  ConverterSpec spec;
  spec.strategy = Strategy::Custom;
  spec.params = {};
  spec.custom = std::move(eval);
  return spec;
}

FilterParams ConverterSpec::filter() const { return {param("l_f"), param("r_f")}; }

double ConverterSpec::param(std::string_view name) const {
  auto it = params.find(name);
  if (it == params.end()) {
    throw ConfigError("strategy " + std::string(to_string(strategy)) + " has no parameter '" +
                      std::string(name) + "'");
  }
  return it->second;
}

Eigen::Matrix2d PowerJacobians::voltage_block() const {
  Eigen::Matrix2d m;
  m << p(0), p(1), q(0), q(1);
  return m;
}

Eigen::Matrix2d PowerJacobians::current_block() const {
  Eigen::Matrix2d m;
  m << p(2), p(3), q(2), q(3);
  return m;
}

PowerJacobians linearize_power(const OperatingPoint& op) {
  op.validate();
  PowerJacobians j;
  j.p << op.id, op.iq, op.ud, op.uq;
  j.q << -op.iq, op.id, op.uq, -op.ud;
  return j;
}

EliminationBlocks elimination_blocks(const ConverterSpec& spec, double omega0, Complex s) {
  if (has_integrator(spec.strategy) && s == Complex(0.0, 0.0)) {
    throw NumericalError("controller integrator pole", s);
  }
  const Mat2 eye = Mat2::Identity();
  const auto& op = spec.op;
  const Eigen::Vector2d i0(op.id, op.iq);
  const Eigen::Matrix2d jrot = rotation_generator();
  EliminationBlocks out;

  switch (spec.strategy) {
    case Strategy::IdealSource: {
      out.a = -filter_admittance(spec.filter(), omega0, s);
      out.b.setZero();
      return out;
    }
    case Strategy::Droop:
    case Strategy::Vsg:
    case Strategy::Voc:
    case Strategy::Vfc: {
      const auto pj = linearize_power(op);
      const Mat2 gf = filter_admittance(spec.filter(), omega0, s);
      const Mat2 kpq = droop_emf_map(spec, omega0, s);
      out.a = gf * (kpq * pj.voltage_block().cast<Complex>() - eye);
      out.b = gf * kpq * pj.current_block().cast<Complex>();
      return out;
    }
    case Strategy::PllPq:
    case Strategy::PllPv: {
      const auto pj = linearize_power(op);
      const auto pll = pll_response(spec, omega0, s);
      const double theta0 = std::atan2(op.uq, op.ud);
      const Mat2 rot = rotation(theta0).cast<Complex>();
      const Complex ti = low_pass(spec.param("omega_i"), s);
      const Complex lm = low_pass(spec.param("omega_m"), s);
      const Complex pi_p = spec.param("k_p") + spec.param("k_i") / s;

      // current references in the PLL frame per unit of (dU, dI)
      Eigen::Matrix<Complex, 2, 4> ref;
      ref.row(0) = (-pi_p * lm) * pj.p.cast<Complex>();
      if (spec.strategy == Strategy::PllPq) {
        ref.row(1) = (pi_p * lm) * pj.q.cast<Complex>();
      } else {
        const Complex pi_v = spec.param("k_p_v") + spec.param("k_i_v") / s;
        const double umag = op.voltage_magnitude();
        ref.row(1).setZero();
        ref(1, 0) = pi_v * lm * op.ud / umag;
        ref(1, 1) = pi_v * lm * op.uq / umag;
      }
      const Eigen::Matrix<Complex, 2, 4> tracked = ti * rot * ref;
      const Eigen::Vector2cd frame = (jrot * i0).cast<Complex>();
      out.a = tracked.leftCols<2>() + pll.hp * frame * pll.n.cast<Complex>();
      out.b = tracked.rightCols<2>();
      return out;
    }
    case Strategy::PllGfm: {
      const auto pj = linearize_power(op);
      const auto pll = pll_response(spec, omega0, s);
      const Mat2 gf = filter_admittance(spec.filter(), omega0, s);
      const Complex ti = low_pass(spec.param("omega_i"), s);
      const Mat2 kpq = droop_emf_map(spec, omega0, s);
      const Eigen::Vector2d e0 = internal_emf(spec);
      const Eigen::Vector2d u0(op.ud, op.uq);
      // frame term: the PLL angle rotates both the virtual-impedance drop and
      // the output current
      const Eigen::Vector2cd frame =
          (jrot * i0).cast<Complex>() - ti * gf * (jrot * (e0 - u0)).cast<Complex>();
      out.a = ti * gf * (kpq * pj.voltage_block().cast<Complex>() - eye) +
              pll.hp * frame * pll.n.cast<Complex>();
      out.b = ti * gf * kpq * pj.current_block().cast<Complex>();
      return out;
    }
    case Strategy::StaticAdmittance:
    case Strategy::Custom:
      break;
  }
  throw ConfigError("strategy " + std::string(to_string(spec.strategy)) +
                    " has no elimination blocks");
}

AdmittanceModel::AdmittanceModel(ConverterSpec spec, double omega0)
    : spec_(std::make_shared<const ConverterSpec>(std::move(spec))), omega0_(omega0) {}

AdmittanceModel AdmittanceModel::scaled(double c) const {
  AdmittanceModel out = *this;
  out.scale_ *= c;
  return out;
}

Mat2 AdmittanceModel::operator()(Complex s) const {
  const auto& spec = *spec_;
  Mat2 y;
  switch (spec.strategy) {
    case Strategy::StaticAdmittance:
      y = spec.param("g") * Mat2::Identity();
      break;
    case Strategy::Custom:
      y = spec.custom(s);
      break;
    default: {
      const auto blocks = elimination_blocks(spec, omega0_, s);
      const Mat2 bracket = Mat2::Identity() - blocks.b;
      if (!all_finite(bracket) || !all_finite(blocks.a)) {
        throw NumericalError("non-finite " + std::string(to_string(spec.strategy)) + " blocks", s);
      }
      if (condition_number(bracket) > kMaxEliminationCondition) {
        throw NumericalError(std::string(to_string(spec.strategy)) + " loop elimination is singular", s);
      }
      y = -bracket.partialPivLu().solve(blocks.a);
    }
  }
  if (!all_finite(y)) {
    throw NumericalError("non-finite " + std::string(to_string(spec.strategy)) + " admittance", s);
  }
  return scale_ * y;
}

AdmittanceModel build_admittance(const ConverterSpec& spec, double omega0) {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("omega0 must be > 0");
  if (spec.strategy == Strategy::Custom) {
    if (!spec.custom) throw ConfigError("custom device evaluator is empty");
    return AdmittanceModel(spec, omega0);
  }
  ConverterSpec checked = spec;
  checked.params = resolve_params(spec.strategy, spec.params);
  checked.op.validate();
  return AdmittanceModel(std::move(checked), omega0);
}

}  // namespace formidex
