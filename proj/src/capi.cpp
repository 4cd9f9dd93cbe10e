#include "formidex/formidex.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "formidex/case_io.hpp"
#include "formidex/errors.hpp"
#include "formidex/forming_index.hpp"
#include "formidex/report.hpp"
#include "formidex/strength.hpp"
#include "formidex/time_response.hpp"

#ifndef FORMIDEX_VERSION
#define FORMIDEX_VERSION "0.0.0"
#endif

using namespace formidex;

struct fdx_device {
  ConverterSpec spec;
};

struct fdx_case {
  NetworkCase c;
};

struct fdx_table {
  Table t;
  std::vector<std::string> notes;  // flattened for indexed access
  bool final_value_ok = true;

  void refresh_notes() {
    notes = t.header_notes;
    notes.insert(notes.end(), t.footer_notes.begin(), t.footer_notes.end());
  }
};

namespace {

thread_local std::string g_last_error;

struct ArgumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
fdx_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return FDX_OK;
  } catch (const ArgumentError& e) {
    g_last_error = e.what();
    return FDX_ERR_ARGUMENT;
  } catch (const ConfigError& e) {
    g_last_error = e.what();
    return FDX_ERR_CONFIG;
  } catch (const NumericalError& e) {
    g_last_error = e.what();
    return FDX_ERR_NUMERICAL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FDX_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return FDX_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal error";
    return FDX_ERR_INTERNAL;
  }
}

template <class T>
const T& need(const T* p, const char* what) {
  if (p == nullptr) throw ArgumentError(std::string(what) + " is null");
  return *p;
}

template <class T>
T& need(T* p, const char* what) {
  if (p == nullptr) throw ArgumentError(std::string(what) + " is null");
  return *p;
}

std::string need_str(const char* p, const char* what) {
  if (p == nullptr) throw ArgumentError(std::string(what) + " is null");
  return p;
}

void need_out(const void* p) {
  if (p == nullptr) throw ArgumentError("output pointer is null");
}

FrequencyGrid to_grid(const fdx_grid* g) {
  const fdx_grid grid = g ? *g : fdx_default_grid();
  return make_freq_grid(grid.fmin_hz, grid.fmax_hz, grid.n_points);
}

void write_matrix(const Mat2& y, double out[8]) {
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      out[2 * (2 * i + k)] = y(i, k).real();
      out[2 * (2 * i + k) + 1] = y(i, k).imag();
    }
  }
}

ConverterSpec& device_slot(NetworkCase& c, int bus) {
  for (auto& d : c.devices) {
    if (d.bus == bus) return d.spec;
  }
  if (c.extra && c.extra->bus == bus) return c.extra->spec;
  throw ConfigError("bus " + std::to_string(bus) + " has no device in the case");
}

fdx_table* new_table(Table t) {
  auto* out = new fdx_table{std::move(t), {}, true};
  out->refresh_notes();
  return out;
}

}  // namespace

extern "C" {

const char* fdx_version(void) { return FORMIDEX_VERSION; }

const char* fdx_last_error(void) { return g_last_error.c_str(); }

fdx_status fdx_device_create(const char* strategy, fdx_device** out) {
  return guarded([&] {
    need_out(out);
    const auto s = parse_strategy(need_str(strategy, "strategy"));
    if (!s || *s == Strategy::Custom)
      throw ConfigError(std::string("unknown strategy '") + strategy + "'");
    *out = new fdx_device{ConverterSpec::make(*s)};
  });
}

fdx_status fdx_device_set_param(fdx_device* dev, const char* name, double value) {
  return guarded([&] {
    auto& d = need(dev, "device");
    const std::string key = need_str(name, "name");
    if (d.spec.strategy == Strategy::Custom) throw ConfigError("custom devices have no parameters");
    ParamMap p = d.spec.params;
    if (!p.count(key))
      throw ConfigError("unknown parameter '" + key + "' for strategy " + std::string(to_string(d.spec.strategy)));
    p[key] = value;
    d.spec.params = resolve_params(d.spec.strategy, p);
  });
}

fdx_status fdx_device_set_operating_point(fdx_device* dev, double ud, double uq, double id, double iq) {
  return guarded([&] {
    auto& d = need(dev, "device");
    const OperatingPoint op{ud, uq, id, iq};
    op.validate();
    d.spec.op = op;
  });
}

fdx_status fdx_device_operating_point(const fdx_device* dev, double out[4]) {
  return guarded([&] {
    const auto& d = need(dev, "device");
    need_out(out);
    out[0] = d.spec.op.ud;
    out[1] = d.spec.op.uq;
    out[2] = d.spec.op.id;
    out[3] = d.spec.op.iq;
  });
}

fdx_status fdx_device_strategy(const fdx_device* dev, const char** name) {
  return guarded([&] {
    const auto& d = need(dev, "device");
    need_out(name);
    *name = to_string(d.spec.strategy).data();
  });
}

fdx_status fdx_device_from_json(const char* text, fdx_device** out) {
  return guarded([&] {
    need_out(out);
    *out = new fdx_device{parse_device(need_str(text, "text"))};
  });
}

fdx_status fdx_device_from_file(const char* path, fdx_device** out) {
  return guarded([&] {
    need_out(out);
    *out = new fdx_device{load_device_file(need_str(path, "path"))};
  });
}

fdx_status fdx_device_custom(fdx_admittance_fn fn, void* user, fdx_device** out) {
  return guarded([&] {
    need_out(out);
    if (fn == nullptr) throw ArgumentError("callback is null");
    auto eval = [fn, user](Complex s) {
      double y[8] = {0, 0, 0, 0, 0, 0, 0, 0};
      if (fn(user, s.real(), s.imag(), y) != 0) throw NumericalError("custom admittance callback failed", s);
      Mat2 m;
      m << Complex(y[0], y[1]), Complex(y[2], y[3]), Complex(y[4], y[5]), Complex(y[6], y[7]);
      return m;
    };
    *out = new fdx_device{ConverterSpec::make_custom(eval)};
  });
}

fdx_status fdx_device_admittance(const fdx_device* dev, double s_re, double s_im, double y[8]) {
  return guarded([&] {
    const auto& d = need(dev, "device");
    need_out(y);
    write_matrix(build_admittance(d.spec)(Complex(s_re, s_im)), y);
  });
}

void fdx_device_free(fdx_device* dev) { delete dev; }

fdx_status fdx_case_from_json(const char* text, fdx_case** out) {
  return guarded([&] {
    need_out(out);
    *out = new fdx_case{parse_case(need_str(text, "text"))};
  });
}

fdx_status fdx_case_from_file(const char* path, fdx_case** out) {
  return guarded([&] {
    need_out(out);
    *out = new fdx_case{load_case_file(need_str(path, "path"))};
  });
}

fdx_status fdx_case_device(const fdx_case* c, int bus, fdx_device** out) {
  return guarded([&] {
    const auto& cs = need(c, "case");
    need_out(out);
    *out = new fdx_device{cs.c.device_at(bus).spec};
  });
}

fdx_status fdx_case_set_device(fdx_case* c, int bus, const fdx_device* dev) {
  return guarded([&] {
    auto& cs = need(c, "case");
    const auto& d = need(dev, "device");
    device_slot(cs.c, bus) = d.spec;
  });
}

fdx_status fdx_case_set_tau(fdx_case* c, double tau) {
  return guarded([&] {
    auto& cs = need(c, "case");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be >= 0");
    cs.c.tau = tau;
  });
}

fdx_status fdx_case_set_omega0(fdx_case* c, double omega0) {
  return guarded([&] {
    auto& cs = need(c, "case");
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("omega0 must be > 0");
    cs.c.omega0 = omega0;
  });
}

fdx_status fdx_case_tau(const fdx_case* c, double* tau) {
  return guarded([&] {
    need_out(tau);
    *tau = need(c, "case").c.tau;
  });
}

fdx_status fdx_case_omega0(const fdx_case* c, double* omega0) {
  return guarded([&] {
    need_out(omega0);
    *omega0 = need(c, "case").c.omega0;
  });
}

void fdx_case_free(fdx_case* c) { delete c; }

fdx_grid fdx_default_grid(void) { return {0.01, 1000.0, 400}; }

fdx_line fdx_default_line(void) {
  const LineParams l;
  return {l.l_g, l.tau, l.omega0};
}

fdx_status fdx_forming_index(const fdx_device* dev, const fdx_line* line, const fdx_grid* grid,
                             fdx_table** out) {
  return guarded([&] {
    const auto& d = need(dev, "device");
    need_out(out);
    const fdx_line l = line ? *line : fdx_default_line();
    const LineParams lp{l.l_g, l.tau, l.omega0};
    const auto sweep = forming_index_sweep(build_admittance(d.spec, lp.omega0), lp, to_grid(grid));
    const auto cls = classify(sweep);
    Table t;
    t.add_column("f_hz", sweep.grid.points());
    t.add_column("fi", sweep.fi);
    for (const auto& b : cls.bands) {
      t.footer_notes.push_back("band " + format_number(b.f_low) + " " + format_number(b.f_high) + " " +
                               std::string(to_string(b.label)));
    }
    for (double x : cls.crossovers) t.footer_notes.push_back("crossover " + format_number(x));
    *out = new_table(std::move(t));
  });
}

fdx_status fdx_strength(const fdx_case* c, const fdx_case* compare, const fdx_grid* grid, fdx_table** out) {
  return guarded([&] {
    const auto& cs = need(c, "case");
    need_out(out);
    const FrequencyGrid g = to_grid(grid);
    const Network net(cs.c);
    const auto sweep = strength_sweep(net, g);
    Table t;
    t.add_column("f_hz", g.points());
    std::vector<double> kappa, alpha, bk, ba, sv, vac;
    for (const auto& p : sweep.points) {
      kappa.push_back(p.kappa);
      alpha.push_back(p.alpha);
      bk.push_back(p.bound_kappa);
      ba.push_back(p.bound_alpha);
      sv.push_back(p.sv_max);
      vac.push_back(p.vacuous ? 1.0 : 0.0);
    }
    t.add_column("kappa", kappa);
    t.add_column("alpha", alpha);
    t.add_column("bound_kappa", bk);
    t.add_column("bound_alpha", ba);
    t.add_column("sv_max", sv);
    t.add_column("vacuous", vac);
    t.footer_notes.push_back("min_kappa " + format_number(sweep.min_kappa()));
    t.footer_notes.push_back("min_alpha " + format_number(sweep.min_alpha()));
    if (compare != nullptr) {
      const Network other(compare->c);
      if (other.network_case().retained != cs.c.retained)
        throw ConfigError("retained: compared cases must retain the same buses in the same order");
      const auto os = strength_sweep(other, g);
      std::vector<double> dk, da;
      for (std::size_t k = 0; k < g.size(); ++k) {
        dk.push_back(os.points[k].kappa - sweep.points[k].kappa);
        da.push_back(os.points[k].alpha - sweep.points[k].alpha);
      }
      t.add_column("delta_kappa", dk);
      t.add_column("delta_alpha", da);
      t.footer_notes.push_back("compare_min_kappa " + format_number(os.min_kappa()));
      t.footer_notes.push_back("compare_min_alpha " + format_number(os.min_alpha()));
    }
    *out = new_table(std::move(t));
  });
}

fdx_step_options fdx_default_step_options(void) {
  const StepOptions so;
  const DisturbanceSpec ds;
  return {ds.bus, ds.amplitude, FDX_AXIS_D, ds.t_step, so.t_end, so.n_samples, so.a_damp};
}

fdx_status fdx_step(const fdx_case* c, const fdx_step_options* opt, fdx_table** out) {
  return guarded([&] {
    const auto& cs = need(c, "case");
    const auto& o = need(opt, "options");
    need_out(out);
    DisturbanceSpec ds;
    ds.bus = o.bus;
    ds.amplitude = o.amplitude;
    switch (o.axis) {
      case FDX_AXIS_D: ds.axis = Axis::D; break;
      case FDX_AXIS_Q: ds.axis = Axis::Q; break;
      case FDX_AXIS_BOTH: ds.axis = Axis::Both; break;
      default: throw ArgumentError("unknown axis");
    }
    ds.t_step = o.t_step;
    StepOptions so{o.t_end, o.n_samples, o.a_damp};
    if (!(so.a_damp > 0.0)) throw ConfigError("a_damp must be > 0");
    const Network net(cs.c);
    const auto ts = step_response(net, ds, so);
    Table t;
    t.header_notes.push_back(std::string("final_value_check=") + (ts.final_value_ok ? "OK" : "FAILED"));
    t.header_notes.push_back("final_value_error=" + format_number(ts.final_value_error));
    t.header_notes.push_back("impulse_norm=" + format_number(ts.impulse_norm));
    t.add_column("t_s", ts.t);
    auto col = [](const RMatrix& m, Eigen::Index b) {
      return std::vector<double>(m.col(b).data(), m.col(b).data() + m.rows());
    };
    for (std::size_t b = 0; b < ts.buses.size(); ++b) {
      const std::string p = "bus_" + std::to_string(ts.buses[b]) + "_";
      const auto i = static_cast<Eigen::Index>(b);
      t.add_column(p + "norm", col(ts.norm, i));
      t.add_column(p + "ud", col(ts.ud, i));
      t.add_column(p + "uq", col(ts.uq, i));
    }
    auto* tab = new_table(std::move(t));
    tab->final_value_ok = ts.final_value_ok;
    *out = tab;
  });
}

fdx_status fdx_step_final_value_ok(const fdx_table* t, int* ok) {
  return guarded([&] {
    need_out(ok);
    *ok = need(t, "table").final_value_ok ? 1 : 0;
  });
}

fdx_status fdx_validate(const fdx_case* c, int* passed, fdx_table** report) {
  return guarded([&] {
    const auto& cs = need(c, "case");
    need_out(passed);
    need_out(report);
    Table t;
    t.header_notes.push_back("schema: OK");
    bool all = true;
    std::unique_ptr<Network> net;
    try {
      net = std::make_unique<Network>(cs.c);
      t.header_notes.push_back("connectivity: OK");
    } catch (const ConfigError& e) {
      t.header_notes.push_back(std::string("connectivity: FAILED ") + e.what());
      all = false;
    }
    std::vector<double> f_hz, ok;
    if (net) {
      if (!net->has_extra()) t.header_notes.push_back("dual-form: no extra device");
      for (double f : {1.0, 10.0, 100.0}) {
        f_hz.push_back(f);
        try {
          net->absorb(Complex(0.0, kTwoPi * f));
          ok.push_back(1.0);
          t.footer_notes.push_back("dual-form at " + format_number(f) + " Hz: OK");
        } catch (const Error& e) {
          ok.push_back(0.0);
          all = false;
          t.footer_notes.push_back("dual-form at " + format_number(f) + " Hz: FAILED " + e.what());
        }
      }
    }
    t.add_column("f_hz", f_hz);
    t.add_column("ok", ok);
    *passed = all ? 1 : 0;
    *report = new_table(std::move(t));
  });
}

size_t fdx_table_rows(const fdx_table* t) { return t ? t->t.rows() : 0; }

size_t fdx_table_cols(const fdx_table* t) { return t ? t->t.columns.size() : 0; }

const char* fdx_table_column_name(const fdx_table* t, size_t col) {
  if (!t || col >= t->t.columns.size()) return nullptr;
  return t->t.columns[col].c_str();
}

const double* fdx_table_column(const fdx_table* t, size_t col) {
  if (!t || col >= t->t.data.size()) return nullptr;
  return t->t.data[col].data();
}

size_t fdx_table_note_count(const fdx_table* t) { return t ? t->notes.size() : 0; }

const char* fdx_table_note(const fdx_table* t, size_t i) {
  if (!t || i >= t->notes.size()) return nullptr;
  return t->notes[i].c_str();
}

fdx_status fdx_table_set_config(fdx_table* t, const char* key, const char* value) {
  return guarded([&] {
    auto& tab = need(t, "table");
    tab.t.config.emplace_back(need_str(key, "key"), need_str(value, "value"));
  });
}

fdx_status fdx_table_render(const fdx_table* t, const char* format, char** out) {
  return guarded([&] {
    const auto& tab = need(t, "table");
    need_out(out);
    const std::string text = render(tab.t, parse_format(need_str(format, "format")));
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

fdx_status fdx_table_write(const fdx_table* t, const char* path, const char* format) {
  return guarded([&] {
    const auto& tab = need(t, "table");
    write_atomic(need_str(path, "path"), render(tab.t, parse_format(need_str(format, "format"))));
  });
}

void fdx_table_free(fdx_table* t) { delete t; }

void fdx_string_free(char* s) { std::free(s); }

}  // extern "C"
