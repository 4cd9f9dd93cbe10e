#include "formidex/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "formidex/errors.hpp"

namespace formidex {

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw ConfigError("format must be csv or json");
}

void Table::add_column(std::string name, std::vector<double> values) {
  if (!data.empty() && values.size() != rows())
    throw ConfigError("column '" + name + "' has a different length");
  columns.push_back(std::move(name));
  data.push_back(std::move(values));
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return data[i];
  }
  throw ConfigError("no column '" + name + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  // guard against a locale with a decimal comma
  for (char* p = buf; *p; ++p) {
    if (*p == ',') *p = '.';
  }
  return buf;
}

std::string render_csv(const Table& t) {
  std::string out;
  for (const auto& n : t.header_notes) out += "# " + n + "\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (c) out += ',';
      out += format_number(t.data[c][r]);
    }
    out += '\n';
  }
  for (const auto& n : t.footer_notes) out += "# " + n + "\n";
  return out;
}

std::string render_json(const Table& t) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    auto arr = nlohmann::ordered_json::array();
    for (double v : t.data[c]) {
      // same 9 significant digits as the CSV
      if (std::isfinite(v)) {
        arr.push_back(std::stod(format_number(v)));
      } else {
        arr.push_back(nullptr);
      }
    }
    doc[t.columns[c]] = std::move(arr);
  }
  auto cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.config) cfg[k] = v;
  if (!t.header_notes.empty() || !t.footer_notes.empty()) {
    auto notes = nlohmann::ordered_json::array();
    for (const auto& n : t.header_notes) notes.push_back(n);
    for (const auto& n : t.footer_notes) notes.push_back(n);
    cfg["notes"] = std::move(notes);
  }
  doc["config"] = std::move(cfg);
  return doc.dump(2) + "\n";
}

std::string render(const Table& t, Format f) {
  return f == Format::Csv ? render_csv(t) : render_json(t);
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::random_device rd;
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot move output into place at '" + path + "'");
  }
}

}  // namespace formidex
