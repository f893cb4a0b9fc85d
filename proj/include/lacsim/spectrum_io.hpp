#pragma once

// Tab-separated spectrum files: '#'-prefixed "key: value" header lines, a
// "# columns:" line, then one row per field point at 13 significant digits.

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lacsim/config.hpp"
#include "lacsim/spectrum.hpp"

namespace lacsim {

struct ColumnOptions {
  bool derivative = false;  // d(value)/dB0 in 1/G
  bool per_center = false;  // one column per trace
};

inline std::string format_cell(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.13g", x);
  return buf;
}

/// Header metadata describing how a spectrum was produced.
inline void annotate(Spectrum& spec, const RunConfig& cfg) {
  spec.set_meta("name", cfg.name);
  spec.set_meta("config_hash", config_hash(cfg));
  spec.set_meta("tau_s", format_cell(cfg.tau_s));
  if (cfg.tau_defaulted) spec.set_meta("tau_note", "tau_s not given, default applied");
  std::string alpha;
  std::vector<std::string> seen;
  for (const auto& c : cfg.components) {
    for (const auto& m : c.ensemble.members) {
      const SpinSystem& s = m.system;
      for (std::size_t k = 0; k < s.center_count(); ++k) {
        const SpinCenter& ctr = s.center(k);
        if (!ctr.has_bright_state()) continue;
        const std::string entry = ctr.label + "=" + format_cell(ctr.alpha);
        if (std::find(seen.begin(), seen.end(), entry) != seen.end()) continue;
        seen.push_back(entry);
        alpha += (alpha.empty() ? "" : ", ") + entry;
      }
    }
  }
  spec.set_meta("alpha", alpha);
  const Vector3& d = cfg.grid.direction;
  spec.set_meta("grid", format_cell(cfg.grid.b_min_gauss) + " .. " + format_cell(cfg.grid.b_max_gauss) + " G, " +
                            std::to_string(cfg.grid.n_points) + " points, direction [" + format_cell(d.x()) +
                            ", " + format_cell(d.y()) + ", " + format_cell(d.z()) + "]");
  spec.set_meta("config", to_yaml(cfg, YamlStyle::flow));
}

inline void write_spectrum(std::ostream& os, const Spectrum& spec, const ColumnOptions& cols = {}) {
  if (spec.fields.size() != spec.values.size()) throw ValidationError("spectrum fields and values differ in length");
  for (const auto& t : spec.traces) {
    if (t.values.size() != spec.fields.size()) throw ValidationError("trace '" + t.name + "' has wrong length");
  }
  std::vector<double> deriv;
  if (cols.derivative) deriv = differentiate(spec.fields, spec.values);

  os << "# lacsim spectrum\n";
  for (const auto& [k, v] : spec.metadata) {
    std::string flat = v;
    for (char& ch : flat) {
      if (ch == '\n' || ch == '\r') ch = ' ';
    }
    os << "# " << k << ": " << flat << "\n";
  }
  os << "# columns: B0_gauss\tvalue";
  if (cols.derivative) os << "\td_value_per_gauss";
  if (cols.per_center) {
    for (const auto& t : spec.traces) os << "\t" << t.name;
  }
  os << "\n";
  for (std::size_t i = 0; i < spec.fields.size(); ++i) {
    os << format_cell(spec.fields[i]) << "\t" << format_cell(spec.values[i]);
    if (cols.derivative) os << "\t" << format_cell(deriv[i]);
    if (cols.per_center) {
      for (const auto& t : spec.traces) os << "\t" << format_cell(t.values[i]);
    }
    os << "\n";
  }
}

namespace io_detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  return f;
}

inline void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed: " + std::strerror(errno));
}

}  // namespace io_detail

inline void write_spectrum(const Spectrum& spec, const std::string& path, const ColumnOptions& cols = {}) {
  std::ofstream f = io_detail::open_out(path);
  write_spectrum(f, spec, cols);
  io_detail::finish(f, path);
}

/// Parses a file written by write_spectrum. Extra columns come back as traces.
inline Spectrum read_spectrum(std::istream& is) {
  Spectrum spec;
  std::vector<std::string> columns;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.size() > 2 ? line.substr(2) : "";
      const auto colon = body.find(": ");
      if (colon == std::string::npos) continue;
      const std::string key = body.substr(0, colon);
      const std::string value = body.substr(colon + 2);
      if (key == "columns") {
        std::istringstream cs(value);
        std::string name;
        while (std::getline(cs, name, '\t')) columns.push_back(name);
        if (columns.size() < 2) throw IoError("line " + std::to_string(line_no) + ": need at least 2 columns");
        for (std::size_t c = 2; c < columns.size(); ++c) spec.traces.push_back(Trace{columns[c], {}});
      } else {
        spec.metadata.emplace_back(key, value);
      }
      continue;
    }
    if (columns.empty()) throw IoError("line " + std::to_string(line_no) + ": data before '# columns:' header");
    std::istringstream row(line);
    std::vector<double> v;
    std::string cell;
    while (std::getline(row, cell, '\t')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IoError("line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (v.size() != columns.size()) {
      throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns.size()) +
                    " columns, got " + std::to_string(v.size()));
    }
    spec.fields.push_back(v[0]);
    spec.values.push_back(v[1]);
    for (std::size_t c = 2; c < v.size(); ++c) spec.traces[c - 2].values.push_back(v[c]);
  }
  return spec;
}

inline Spectrum read_spectrum(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading: " + std::strerror(errno));
  return read_spectrum(f);
}

/// Rebuilds the RunConfig recorded in a spectrum header.
inline RunConfig config_from_metadata(const Spectrum& spec) {
  const std::string text = spec.meta("config");
  if (text.empty()) throw ValidationError("spectrum header carries no config");
  RunConfig cfg = parse_config(text);
  cfg.tau_defaulted = !spec.meta("tau_note").empty();
  return cfg;
}

struct LabeledCrossing {
  std::string member;
  Crossing crossing;
};

inline void write_crossings(std::ostream& os, const std::vector<LabeledCrossing>& rows) {
  os << "# lacsim crossings\n";
  os << "# columns: member\tB0_gauss\tlower\tupper\tmin_gap_mhz\tkind\n";
  for (const auto& r : rows) {
    const Crossing& c = r.crossing;
    os << r.member << "\t" << format_cell(c.field_gauss) << "\t" << c.lower << "\t" << c.upper << "\t"
       << format_cell(c.min_gap_mhz) << "\t" << (c.avoided ? "anticrossing" : "crossing") << "\n";
  }
}

inline void write_crossings(const std::vector<LabeledCrossing>& rows, const std::string& path) {
  std::ofstream f = io_detail::open_out(path);
  write_crossings(f, rows);
  io_detail::finish(f, path);
}

}  // namespace lacsim
