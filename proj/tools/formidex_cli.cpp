// formidex command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "formidex/formidex.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Failure {
  fdx_status status;
  std::string message;
};

void check(fdx_status st) {
  if (st != FDX_OK) throw Failure{st, fdx_last_error()};
}

void config_error(const std::string& msg) { throw Failure{FDX_ERR_CONFIG, msg}; }

struct DeviceDeleter {
  void operator()(fdx_device* d) const { fdx_device_free(d); }
};
struct CaseDeleter {
  void operator()(fdx_case* c) const { fdx_case_free(c); }
};
struct TableDeleter {
  void operator()(fdx_table* t) const { fdx_table_free(t); }
};
using DevicePtr = std::unique_ptr<fdx_device, DeviceDeleter>;
using CasePtr = std::unique_ptr<fdx_case, CaseDeleter>;
using TablePtr = std::unique_ptr<fdx_table, TableDeleter>;

struct Options {
  std::string case_path;
  std::string device_path;
  std::string compare_path;
  std::string strategy;
  std::vector<std::string> params;
  std::optional<int> bus;
  std::optional<int> override_bus;
  std::optional<double> lg;
  std::optional<double> tau;
  std::optional<double> omega0;
  std::optional<double> fmin;
  std::optional<double> fmax;
  std::optional<int> points;
  std::optional<double> amp;
  std::optional<std::string> axis;
  std::optional<double> t_step;
  std::optional<double> t_end;
  std::optional<int> samples;
  std::optional<double> a_damp;
  std::string out;
  std::string format = "csv";
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

CasePtr load_case(const std::string& path) {
  if (path.empty()) config_error("--case is required");
  fdx_case* c = nullptr;
  check(fdx_case_from_file(path.c_str(), &c));
  return CasePtr(c);
}

void apply_params(fdx_device* dev, const std::vector<std::string>& params) {
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) config_error("--param expects name=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string text = kv.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (...) {
      used = 0;
    }
    if (used == 0 || used != text.size()) config_error("--param " + key + ": '" + text + "' is not a number");
    check(fdx_device_set_param(dev, key.c_str(), value));
  }
}

/// New device of the requested strategy keeping the operating point of base.
DevicePtr restrategize(const fdx_device* base, const std::string& strategy) {
  fdx_device* d = nullptr;
  check(fdx_device_create(strategy.c_str(), &d));
  DevicePtr dev(d);
  if (base) {
    double op[4];
    check(fdx_device_operating_point(base, op));
    check(fdx_device_set_operating_point(dev.get(), op[0], op[1], op[2], op[3]));
  }
  return dev;
}

void apply_case_overrides(fdx_case* c, const Options& o) {
  if (o.tau) check(fdx_case_set_tau(c, *o.tau));
  if (o.omega0) check(fdx_case_set_omega0(c, *o.omega0));
  if (!o.override_bus) {
    if (!o.strategy.empty() || !o.params.empty())
      config_error("--strategy/--param on a case need --override-bus");
    return;
  }
  fdx_device* cur = nullptr;
  check(fdx_case_device(c, *o.override_bus, &cur));
  DevicePtr current(cur);
  DevicePtr dev = o.strategy.empty() ? std::move(current) : restrategize(current.get(), o.strategy);
  apply_params(dev.get(), o.params);
  check(fdx_case_set_device(c, *o.override_bus, dev.get()));
}

fdx_grid grid_from(const Options& o) {
  fdx_grid g = fdx_default_grid();
  if (o.fmin) g.fmin_hz = *o.fmin;
  if (o.fmax) g.fmax_hz = *o.fmax;
  if (o.points) g.n_points = *o.points;
  return g;
}

void echo(fdx_table* t, const char* key, const std::string& value) {
  check(fdx_table_set_config(t, key, value.c_str()));
}

void echo_common(fdx_table* t, const std::string& command, const Options& o) {
  echo(t, "command", command);
  echo(t, "version", fdx_version());
  if (!o.case_path.empty()) echo(t, "case", o.case_path);
  if (!o.device_path.empty()) echo(t, "device", o.device_path);
  if (!o.compare_path.empty()) echo(t, "compare", o.compare_path);
  if (!o.strategy.empty()) echo(t, "strategy", o.strategy);
  for (const auto& p : o.params) echo(t, "param", p);
  if (o.bus) echo(t, "bus", std::to_string(*o.bus));
  if (o.override_bus) echo(t, "override_bus", std::to_string(*o.override_bus));
}

void echo_grid(fdx_table* t, const fdx_grid& g) {
  echo(t, "fmin_hz", num(g.fmin_hz));
  echo(t, "fmax_hz", num(g.fmax_hz));
  echo(t, "points", std::to_string(g.n_points));
}

void emit(fdx_table* t, const Options& o) {
  if (o.format != "csv" && o.format != "json") config_error("--format must be csv or json");
  if (!o.out.empty()) {
    check(fdx_table_write(t, o.out.c_str(), o.format.c_str()));
    return;
  }
  char* text = nullptr;
  check(fdx_table_render(t, o.format.c_str(), &text));
  std::fputs(text, stdout);
  fdx_string_free(text);
}

int cmd_fi(const Options& o) {
  DevicePtr dev;
  fdx_line line = fdx_default_line();
  if (!o.device_path.empty()) {
    if (!o.case_path.empty()) config_error("--device and --case are exclusive");
    fdx_device* d = nullptr;
    check(fdx_device_from_file(o.device_path.c_str(), &d));
    dev.reset(d);
    if (!o.strategy.empty()) dev = restrategize(dev.get(), o.strategy);
  } else if (!o.case_path.empty()) {
    if (!o.bus) config_error("--case needs --bus to pick a device");
    CasePtr c = load_case(o.case_path);
    fdx_device* d = nullptr;
    check(fdx_case_device(c.get(), *o.bus, &d));
    dev.reset(d);
    check(fdx_case_tau(c.get(), &line.tau));
    check(fdx_case_omega0(c.get(), &line.omega0));
    if (!o.strategy.empty()) dev = restrategize(dev.get(), o.strategy);
  } else {
    if (o.strategy.empty()) config_error("fi needs --device, --case with --bus, or --strategy");
    dev = restrategize(nullptr, o.strategy);
  }
  apply_params(dev.get(), o.params);
  if (o.lg) line.l_g = *o.lg;
  if (o.tau) line.tau = *o.tau;
  if (o.omega0) line.omega0 = *o.omega0;

  const fdx_grid g = grid_from(o);
  fdx_table* t = nullptr;
  check(fdx_forming_index(dev.get(), &line, &g, &t));
  TablePtr table(t);
  echo_common(t, "fi", o);
  const char* strategy = nullptr;
  check(fdx_device_strategy(dev.get(), &strategy));
  echo(t, "device_strategy", strategy);
  echo(t, "l_g", num(line.l_g));
  echo(t, "tau", num(line.tau));
  echo(t, "omega0", num(line.omega0));
  echo_grid(t, g);
  emit(t, o);
  return kExitOk;
}

int cmd_strength(const Options& o) {
  CasePtr c = load_case(o.case_path);
  apply_case_overrides(c.get(), o);
  CasePtr other;
  if (!o.compare_path.empty()) {
    other = load_case(o.compare_path);
    if (o.tau) check(fdx_case_set_tau(other.get(), *o.tau));
    if (o.omega0) check(fdx_case_set_omega0(other.get(), *o.omega0));
  }
  const fdx_grid g = grid_from(o);
  fdx_table* t = nullptr;
  check(fdx_strength(c.get(), other.get(), &g, &t));
  TablePtr table(t);
  echo_common(t, "strength", o);
  echo_grid(t, g);
  emit(t, o);
  return kExitOk;
}

int cmd_step(const Options& o) {
  CasePtr c = load_case(o.case_path);
  apply_case_overrides(c.get(), o);
  if (!o.bus) config_error("step needs --bus");
  fdx_step_options so = fdx_default_step_options();
  so.bus = *o.bus;
  if (o.amp) so.amplitude = *o.amp;
  if (o.axis) {
    if (*o.axis == "d") {
      so.axis = FDX_AXIS_D;
    } else if (*o.axis == "q") {
      so.axis = FDX_AXIS_Q;
    } else if (*o.axis == "both") {
      so.axis = FDX_AXIS_BOTH;
    } else {
      config_error("--axis must be d, q or both");
    }
  }
  if (o.t_step) so.t_step = *o.t_step;
  if (o.t_end) so.t_end = *o.t_end;
  if (o.samples) so.n_samples = *o.samples;
  if (o.a_damp) so.a_damp = *o.a_damp;
  fdx_table* t = nullptr;
  check(fdx_step(c.get(), &so, &t));
  TablePtr table(t);
  echo_common(t, "step", o);
  echo(t, "amp", num(so.amplitude));
  echo(t, "axis", so.axis == FDX_AXIS_D ? "d" : so.axis == FDX_AXIS_Q ? "q" : "both");
  echo(t, "t_step", num(so.t_step));
  echo(t, "t_end", num(so.t_end));
  echo(t, "samples", std::to_string(so.n_samples));
  echo(t, "a_damp", num(so.a_damp));
  int ok = 1;
  check(fdx_step_final_value_ok(t, &ok));
  if (!ok) std::fprintf(stderr, "formidex: warning: final value check FAILED, response is not trusted\n");
  emit(t, o);
  return kExitOk;
}

int cmd_validate(const Options& o) {
  fdx_case* raw = nullptr;
  if (o.case_path.empty()) config_error("--case is required");
  const fdx_status st = fdx_case_from_file(o.case_path.c_str(), &raw);
  if (st != FDX_OK) {
    // schema and connectivity failures surface here
    std::fprintf(stderr, "formidex: validation FAILED\n  load: %s\n", fdx_last_error());
    return kExitConfig;
  }
  CasePtr c(raw);
  apply_case_overrides(c.get(), o);
  int passed = 0;
  fdx_table* t = nullptr;
  check(fdx_validate(c.get(), &passed, &t));
  TablePtr table(t);
  echo_common(t, "validate", o);
  emit(t, o);
  if (!passed) {
    std::fprintf(stderr, "formidex: validation FAILED\n");
    for (std::size_t i = 0; i < fdx_table_note_count(t); ++i) {
      const std::string note = fdx_table_note(t, i);
      if (note.find("FAILED") != std::string::npos) std::fprintf(stderr, "  %s\n", note.c_str());
    }
    return kExitConfig;
  }
  return kExitOk;
}

void add_grid(CLI::App* sub, Options& o) {
  sub->add_option("--fmin", o.fmin, "Lowest frequency [Hz] (default 0.01)");
  sub->add_option("--fmax", o.fmax, "Highest frequency [Hz] (default 1000)");
  sub->add_option("--points", o.points, "Number of log-spaced points (default 400)");
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Output file (default: standard output)");
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_override(CLI::App* sub, Options& o) {
  sub->add_option("--override-bus", o.override_bus, "Bus whose device is replaced or re-parameterised");
  sub->add_option("--strategy", o.strategy, "Strategy of the overriding device");
  sub->add_option("--param", o.params, "Device parameter name=value (repeatable)");
  sub->add_option("--tau", o.tau, "Uniform R/L ratio, overrides the case");
  sub->add_option("--omega0", o.omega0, "Base angular frequency [rad/s], overrides the case");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"formidex: forming index and system strength of converter-based grids"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fdx_version()));
  Options o;

  auto* fi = app.add_subcommand("fi", "Forming index sweep of one device behind a test line");
  fi->add_option("--device", o.device_path, "Device JSON file");
  fi->add_option("--case", o.case_path, "Case JSON file (with --bus)");
  fi->add_option("--bus", o.bus, "Bus of the case device");
  fi->add_option("--strategy", o.strategy, "Strategy (standalone device or replacement)");
  fi->add_option("--param", o.params, "Device parameter name=value (repeatable)");
  fi->add_option("--lg", o.lg, "Test line inductance [p.u.] (default 0.3)");
  fi->add_option("--tau", o.tau, "Test line R/L ratio (default 0.1)");
  fi->add_option("--omega0", o.omega0, "Base angular frequency [rad/s]");
  add_grid(fi, o);
  add_output(fi, o);

  auto* strength = app.add_subcommand("strength", "System and grid strength sweep of a case");
  strength->add_option("--case", o.case_path, "Case JSON file")->required();
  strength->add_option("--compare", o.compare_path, "Second case; adds delta columns");
  add_override(strength, o);
  add_grid(strength, o);
  add_output(strength, o);

  auto* step = app.add_subcommand("step", "Voltage response to a current step");
  step->add_option("--case", o.case_path, "Case JSON file")->required();
  step->add_option("--bus", o.bus, "Disturbed bus")->required();
  step->add_option("--amp", o.amp, "Step amplitude [p.u.] (default 1)");
  step->add_option("--axis", o.axis, "d, q or both (default d)");
  step->add_option("--t-step", o.t_step, "Step time [s] (default 0.5)");
  step->add_option("--t-end", o.t_end, "End time [s] (default 2)");
  step->add_option("--samples", o.samples, "Number of intervals (default 2000)");
  step->add_option("--a-damp", o.a_damp, "Contour damping (default 18.4)");
  add_override(step, o);
  add_output(step, o);

  auto* validate = app.add_subcommand("validate", "Schema, connectivity and dual-form checks");
  validate->add_option("--case", o.case_path, "Case JSON file")->required();
  add_override(validate, o);
  add_output(validate, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*fi) return cmd_fi(o);
    if (*strength) return cmd_strength(o);
    if (*step) return cmd_step(o);
    if (*validate) return cmd_validate(o);
  } catch (const Failure& f) {
    std::fprintf(stderr, "formidex: error: %s\n", f.message.c_str());
    return f.status == FDX_ERR_NUMERICAL || f.status == FDX_ERR_INTERNAL ? kExitNumerical : kExitConfig;
  }
  return kExitConfig;
}
