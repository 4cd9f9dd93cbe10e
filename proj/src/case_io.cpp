#include "formidex/case_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "formidex/errors.hpp"

namespace formidex {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(path + "." + it.key() + ": unknown key");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + "." + key + ": missing required key");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  return v.get<double>();
}

int bus_id(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer bus id");
  return v.get<int>();
}

const json& object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path + ": expected an object");
  return v;
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array");
  return v;
}

ConverterSpec device_from(const json& v, const std::string& path, bool with_bus) {
  object(v, path);
  if (with_bus) {
    reject_unknown(v, path, {"bus", "strategy", "params", "operating_point"});
  } else {
    reject_unknown(v, path, {"strategy", "params", "operating_point"});
  }
  const json& name = require(v, path, "strategy");
  if (!name.is_string()) throw ConfigError(path + ".strategy: expected a string");
  const auto strategy = parse_strategy(name.get<std::string>());
  if (!strategy || *strategy == Strategy::Custom)
    throw ConfigError(path + ".strategy: unknown strategy '" + name.get<std::string>() + "'");

  ParamMap overrides;
  if (auto it = v.find("params"); it != v.end()) {
    object(*it, path + ".params");
    for (auto p = it->begin(); p != it->end(); ++p) {
      overrides[p.key()] = number(p.value(), path + ".params." + p.key());
    }
  }
  OperatingPoint op;
  if (auto it = v.find("operating_point"); it != v.end()) {
    const std::string opp = path + ".operating_point";
    object(*it, opp);
    reject_unknown(*it, opp, {"ud", "uq", "id", "iq"});
    if (auto f = it->find("ud"); f != it->end()) op.ud = number(*f, opp + ".ud");
    if (auto f = it->find("uq"); f != it->end()) op.uq = number(*f, opp + ".uq");
    if (auto f = it->find("id"); f != it->end()) op.id = number(*f, opp + ".id");
    if (auto f = it->find("iq"); f != it->end()) op.iq = number(*f, opp + ".iq");
  }
  try {
    op.validate();
    return ConverterSpec::make(*strategy, overrides, op);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NetworkCase parse_case(std::string_view text) {
  const json doc = parse_json(text);
  const std::string root = "$";
  object(doc, root);
  reject_unknown(doc, root,
                 {"omega0_rad_s", "tau", "buses", "branches", "devices", "retained", "extra_device"});

  NetworkCase c;
  if (auto it = doc.find("omega0_rad_s"); it != doc.end()) c.omega0 = number(*it, "$.omega0_rad_s");
  if (auto it = doc.find("tau"); it != doc.end()) c.tau = number(*it, "$.tau");

  const json& buses = array(require(doc, root, "buses"), "$.buses");
  for (std::size_t i = 0; i < buses.size(); ++i)
    c.buses.push_back(bus_id(buses[i], "$.buses[" + std::to_string(i) + "]"));

  const json& branches = array(require(doc, root, "branches"), "$.branches");
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const std::string p = "$.branches[" + std::to_string(i) + "]";
    object(branches[i], p);
    reject_unknown(branches[i], p, {"from", "to", "l_pu"});
    Branch br;
    br.from = bus_id(require(branches[i], p, "from"), p + ".from");
    br.to = bus_id(require(branches[i], p, "to"), p + ".to");
    br.l_pu = number(require(branches[i], p, "l_pu"), p + ".l_pu");
    if (!(br.l_pu > 0.0)) throw ConfigError(p + ".l_pu: must be > 0");
    c.branches.push_back(br);
  }

  const json& devices = array(require(doc, root, "devices"), "$.devices");
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const std::string p = "$.devices[" + std::to_string(i) + "]";
    object(devices[i], p);
    DeviceEntry d;
    d.bus = bus_id(require(devices[i], p, "bus"), p + ".bus");
    d.spec = device_from(devices[i], p, true);
    c.devices.push_back(std::move(d));
  }

  const json& retained = array(require(doc, root, "retained"), "$.retained");
  for (std::size_t i = 0; i < retained.size(); ++i)
    c.retained.push_back(bus_id(retained[i], "$.retained[" + std::to_string(i) + "]"));

  if (auto it = doc.find("extra_device"); it != doc.end() && !it->is_null()) {
    const std::string p = "$.extra_device";
    object(*it, p);
    DeviceEntry d;
    d.bus = bus_id(require(*it, p, "bus"), p + ".bus");
    d.spec = device_from(*it, p, true);
    c.extra = std::move(d);
  }

  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("$.") + e.what());
  }
  return c;
}

NetworkCase load_case_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_case(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ConverterSpec parse_device(std::string_view text) { return device_from(parse_json(text), "$", false); }

ConverterSpec load_device_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_device(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace formidex
