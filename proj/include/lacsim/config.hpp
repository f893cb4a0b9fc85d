#pragma once

// YAML run configuration: parsing with line-numbered diagnostics, canonical
// emission (block or flow) and a content hash.
//
// Every physical quantity carries its unit in the key name. A config either
// lists `components` (each an orientation ensemble of `members`), or gives a
// single `system` as shorthand for one component with one member.

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "lacsim/run_config.hpp"

namespace lacsim {

/// Malformed or invalid config text. `line` is 1-based, 0 when unknown.
class ConfigError : public ValidationError {
 public:
  ConfigError(int line, const std::string& path, const std::string& message)
      : ValidationError(format(line, path, message)), line_(line) {}

  int line() const { return line_; }

 private:
  static std::string format(int line, const std::string& path, const std::string& message) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!path.empty()) out += " (" + path + ")";
    return out + ": " + message;
  }

  int line_ = 0;
};

inline constexpr double kDefaultDipolarMhz = 1.0;
inline const Vector3 kDefaultInterCenterDirection = Vector3::UnitX();

namespace config_detail {

inline int line_of(const YAML::Node& n) {
  if (!n.IsDefined()) return 0;
  const YAML::Mark m = n.Mark();
  return m.line >= 0 ? m.line + 1 : 0;
}

[[noreturn]] inline void fail(const YAML::Node& n, const std::string& path, const std::string& message) {
  throw ConfigError(line_of(n), path, message);
}

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Typed access to one YAML mapping, rejecting keys it does not know.
class MapReader {
 public:
  MapReader(const YAML::Node& node, std::string path, std::initializer_list<const char*> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) fail(node_, path_, "expected a mapping");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, join(path_, key), "unknown key '" + key + "'");
    }
  }

  bool has(const char* key) const { return static_cast<bool>(node_[key]); }
  YAML::Node child(const char* key) const { return node_[key]; }
  std::string path(const char* key) const { return join(path_, key); }
  const YAML::Node& node() const { return node_; }

  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  double number(const char* key) const {
    const YAML::Node n = require(key);
    double v = 0.0;
    if (!n.IsScalar() || !YAML::convert<double>::decode(n, v)) fail(n, path(key), "expected a number");
    if (!std::isfinite(v)) fail(n, path(key), "value must be finite");
    return v;
  }

  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const YAML::Node n = node_[key];
    int v = 0;
    if (!n.IsScalar() || !YAML::convert<int>::decode(n, v)) fail(n, path(key), "expected an integer");
    return v;
  }

  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const YAML::Node n = node_[key];
    bool v = false;
    if (!n.IsScalar() || !YAML::convert<bool>::decode(n, v)) fail(n, path(key), "expected true or false");
    return v;
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const YAML::Node n = node_[key];
    if (!n.IsScalar()) fail(n, path(key), "expected a string");
    return n.Scalar();
  }

  YAML::Node require(const char* key) const {
    const YAML::Node n = node_[key];
    if (!n) fail(node_, path(key), "missing required key '" + std::string(key) + "'");
    return n;
  }

 private:
  YAML::Node node_;
  std::string path_;
};

/// [x, y, z] (normalized if not already unit) or {polar_deg, azimuth_deg}.
inline Vector3 parse_direction(const YAML::Node& n, const std::string& path) {
  Vector3 v;
  if (n.IsSequence()) {
    if (n.size() != 3) fail(n, path, "direction needs exactly 3 components");
    for (std::size_t k = 0; k < 3; ++k) {
      double c = 0.0;
      if (!YAML::convert<double>::decode(n[k], c) || !std::isfinite(c)) {
        fail(n[k], path, "direction component is not a finite number");
      }
      v(static_cast<int>(k)) = c;
    }
  } else if (n.IsMap()) {
    MapReader r(n, path, {"polar_deg", "azimuth_deg"});
    v = direction_from_angles(units::degrees_to_radians(r.number("polar_deg")),
                              units::degrees_to_radians(r.number("azimuth_deg", 0.0)));
  } else {
    fail(n, path, "direction must be [x, y, z] or {polar_deg, azimuth_deg}");
  }
  const double norm = v.norm();
  if (norm == 0.0) fail(n, path, "direction must be nonzero");
  if (std::abs(norm - 1.0) > kAxisNormTolerance) v /= norm;
  return v;
}

inline SpinQuantum parse_spin(const MapReader& r, const char* key, double fallback) {
  const double s = r.number(key, fallback);
  try {
    return SpinQuantum::from_value(s);
  } catch (const ValidationError& e) {
    fail(r.has(key) ? r.child(key) : r.node(), r.path(key), e.what());
  }
}

inline Nucleus parse_nucleus(const YAML::Node& n, const std::string& path, const Vector3& center_axis,
                             std::size_t index) {
  MapReader r(n, path,
              {"label", "spin", "a_parallel_mhz", "a_perpendicular_mhz", "a_iso_mhz", "quadrupole_mhz",
               "axis", "quadrupole_axis"});
  Nucleus nuc;
  nuc.label = r.text("label", "nucleus" + std::to_string(index + 1));
  nuc.i = parse_spin(r, "spin", 1.0);
  if (r.has("a_iso_mhz")) {
    if (r.has("a_parallel_mhz") || r.has("a_perpendicular_mhz")) {
      fail(n, path, "give either a_iso_mhz or a_parallel_mhz/a_perpendicular_mhz");
    }
    nuc.hfc.parallel = nuc.hfc.perpendicular = r.number("a_iso_mhz");
  } else {
    nuc.hfc.parallel = r.number("a_parallel_mhz", 0.0);
    nuc.hfc.perpendicular = r.number("a_perpendicular_mhz", 0.0);
  }
  nuc.hfc.axis = r.has("axis") ? parse_direction(r.child("axis"), r.path("axis")) : center_axis;
  nuc.quadrupole_mhz = r.number("quadrupole_mhz", 0.0);
  nuc.quadrupole_axis =
      r.has("quadrupole_axis") ? parse_direction(r.child("quadrupole_axis"), r.path("quadrupole_axis")) : nuc.hfc.axis;
  return nuc;
}

inline SpinCenter parse_center(const YAML::Node& n, const std::string& path, const std::string& default_label) {
  MapReader r(n, path,
              {"label", "spin", "g", "g_parallel", "g_perpendicular", "g_axis", "zfs_d_mhz", "axis", "alpha",
               "nuclei"});
  SpinCenter c;
  c.label = r.text("label", default_label);
  c.s = parse_spin(r, "spin", 1.0);
  const Vector3 axis = r.has("axis") ? parse_direction(r.child("axis"), r.path("axis")) : Vector3::UnitZ();
  c.zfs_axis = axis;
  if (r.has("g") && (r.has("g_parallel") || r.has("g_perpendicular"))) {
    fail(n, path, "give either g or g_parallel/g_perpendicular");
  }
  const double g_iso = r.number("g", 2.0023);
  c.g.parallel = r.number("g_parallel", g_iso);
  c.g.perpendicular = r.number("g_perpendicular", g_iso);
  c.g.axis = r.has("g_axis") ? parse_direction(r.child("g_axis"), r.path("g_axis")) : axis;
  c.zfs_d_mhz = r.number("zfs_d_mhz", 0.0);
  c.alpha = r.number("alpha", c.has_bright_state() ? 1.0 : 0.0);
  if (r.has("nuclei")) {
    const YAML::Node list = r.child("nuclei");
    if (!list.IsSequence()) fail(list, r.path("nuclei"), "expected a list");
    for (std::size_t k = 0; k < list.size(); ++k) {
      c.nuclei.push_back(parse_nucleus(list[k], r.path("nuclei") + "[" + std::to_string(k) + "]", axis, k));
    }
  }
  return c;
}

inline SpinSystem parse_system(const YAML::Node& n, const std::string& path) {
  MapReader r(n, path, {"center1", "center2", "dipolar_mhz", "n12"});
  SpinSystem s;
  s.center1 = parse_center(r.require("center1"), r.path("center1"), "center1");
  if (r.has("center2")) s.center2 = parse_center(r.child("center2"), r.path("center2"), "center2");
  s.dipolar_mhz = r.number("dipolar_mhz", s.center2 ? kDefaultDipolarMhz : 0.0);
  s.n12 = r.has("n12") ? parse_direction(r.child("n12"), r.path("n12")) : kDefaultInterCenterDirection;
  if (!s.center2 && s.dipolar_mhz != 0.0) fail(n, path, "dipolar_mhz needs a center2");
  try {
    validate(s);
  } catch (const ValidationError& e) {
    fail(n, path, e.what());
  }
  return s;
}

inline OrientationEnsemble parse_members(const YAML::Node& list, const std::string& path) {
  if (!list.IsSequence() || list.size() == 0) fail(list, path, "expected a nonempty list of members");
  OrientationEnsemble e;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    MapReader r(list[k], p, {"label", "weight", "system"});
    EnsembleMember m;
    m.label = r.text("label", "member" + std::to_string(k + 1));
    m.weight = r.number("weight", 1.0);
    if (m.weight < 0.0) fail(r.child("weight"), r.path("weight"), "weight must be non-negative");
    m.system = parse_system(r.require("system"), r.path("system"));
    e.members.push_back(std::move(m));
  }
  return e;
}

inline FieldGrid parse_grid(const YAML::Node& n, const std::string& path) {
  MapReader r(n, path, {"b_min_gauss", "b_max_gauss", "n_points", "direction"});
  FieldGrid g;
  g.b_min_gauss = r.number("b_min_gauss", g.b_min_gauss);
  g.b_max_gauss = r.number("b_max_gauss", g.b_max_gauss);
  g.n_points = r.integer("n_points", g.n_points);
  if (r.has("direction")) g.direction = parse_direction(r.child("direction"), r.path("direction"));
  try {
    validate(g);
  } catch (const ValidationError& e) {
    fail(n, path, e.what());
  }
  return g;
}

inline OutputOptions parse_outputs(const YAML::Node& n, const std::string& path) {
  MapReader r(n, path, {"derivative", "crossings", "per_center", "path"});
  OutputOptions o;
  o.derivative = r.flag("derivative", false);
  o.crossings = r.flag("crossings", false);
  o.per_center = r.flag("per_center", false);
  o.path = r.text("path", "");
  return o;
}

}  // namespace config_detail

/// Parses and validates a YAML run configuration.
inline RunConfig parse_config(std::string_view text) {
  using namespace config_detail;
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line >= 0 ? e.mark.line + 1 : 0, "", e.msg);
  }
  if (!root.IsMap()) throw ConfigError(line_of(root), "", "top level must be a mapping");

  MapReader r(root, "", {"name", "tau_s", "grid", "outputs", "components", "system"});
  RunConfig cfg;
  cfg.name = r.text("name", "run");
  if (r.has("tau_s")) {
    cfg.tau_s = r.number("tau_s");
    if (!(cfg.tau_s > 0.0)) fail(r.child("tau_s"), "tau_s", "tau_s must be positive");
  } else {
    cfg.tau_defaulted = true;
  }
  if (r.has("grid")) cfg.grid = parse_grid(r.child("grid"), "grid");
  if (r.has("outputs")) cfg.outputs = parse_outputs(r.child("outputs"), "outputs");

  if (r.has("system") == r.has("components")) fail(root, "", "give exactly one of 'system' or 'components'");
  if (r.has("system")) {
    EnsembleMember m{cfg.name, 1.0, parse_system(r.child("system"), "system")};
    cfg.components = {Component{cfg.name, 1.0, OrientationEnsemble{{std::move(m)}}}};
  } else {
    const YAML::Node list = r.child("components");
    if (!list.IsSequence() || list.size() == 0) fail(list, "components", "expected a nonempty list");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string p = "components[" + std::to_string(k) + "]";
      MapReader c(list[k], p, {"label", "weight", "members"});
      Component comp;
      comp.label = c.text("label", "component" + std::to_string(k + 1));
      comp.weight = c.number("weight", 1.0);
      comp.ensemble = parse_members(c.require("members"), c.path("members"));
      cfg.components.push_back(std::move(comp));
    }
  }
  validate(cfg);
  return cfg;
}

// ---------------------------------------------------------------------------
// Emission

enum class YamlStyle { block, flow };

namespace config_detail {

/// Shortest text that parses back to exactly x.
inline std::string shortest(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct Num {
  double x;
};

inline YAML::Emitter& operator<<(YAML::Emitter& out, Num n) { return out << shortest(n.x); }

inline void emit_vector(YAML::Emitter& out, const Vector3& v) {
  out << YAML::Flow << YAML::BeginSeq << Num{v.x()} << Num{v.y()} << Num{v.z()} << YAML::EndSeq;
}

inline void emit_center(YAML::Emitter& out, const SpinCenter& c) {
  out << YAML::BeginMap;
  out << YAML::Key << "label" << YAML::Value << c.label;
  out << YAML::Key << "spin" << YAML::Value << Num{c.s.value()};
  out << YAML::Key << "g_parallel" << YAML::Value << Num{c.g.parallel};
  out << YAML::Key << "g_perpendicular" << YAML::Value << Num{c.g.perpendicular};
  out << YAML::Key << "zfs_d_mhz" << YAML::Value << Num{c.zfs_d_mhz};
  out << YAML::Key << "axis" << YAML::Value;
  emit_vector(out, c.zfs_axis);
  if (c.g.axis != c.zfs_axis) {
    out << YAML::Key << "g_axis" << YAML::Value;
    emit_vector(out, c.g.axis);
  }
  out << YAML::Key << "alpha" << YAML::Value << Num{c.alpha};
  if (!c.nuclei.empty()) {
    out << YAML::Key << "nuclei" << YAML::Value << YAML::BeginSeq;
    for (const auto& n : c.nuclei) {
      out << YAML::BeginMap;
      out << YAML::Key << "label" << YAML::Value << n.label;
      out << YAML::Key << "spin" << YAML::Value << Num{n.i.value()};
      out << YAML::Key << "a_parallel_mhz" << YAML::Value << Num{n.hfc.parallel};
      out << YAML::Key << "a_perpendicular_mhz" << YAML::Value << Num{n.hfc.perpendicular};
      out << YAML::Key << "quadrupole_mhz" << YAML::Value << Num{n.quadrupole_mhz};
      out << YAML::Key << "axis" << YAML::Value;
      emit_vector(out, n.hfc.axis);
      if (n.quadrupole_axis != n.hfc.axis) {
        out << YAML::Key << "quadrupole_axis" << YAML::Value;
        emit_vector(out, n.quadrupole_axis);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
}

inline void emit_system(YAML::Emitter& out, const SpinSystem& s) {
  out << YAML::BeginMap;
  out << YAML::Key << "center1" << YAML::Value;
  emit_center(out, s.center1);
  if (s.center2) {
    out << YAML::Key << "center2" << YAML::Value;
    emit_center(out, *s.center2);
  }
  out << YAML::Key << "dipolar_mhz" << YAML::Value << Num{s.dipolar_mhz};
  out << YAML::Key << "n12" << YAML::Value;
  emit_vector(out, s.n12);
  out << YAML::EndMap;
}

inline bool is_shorthand(const RunConfig& cfg) {
  if (cfg.components.size() != 1) return false;
  const Component& c = cfg.components.front();
  return c.label == cfg.name && c.weight == 1.0 && c.ensemble.members.size() == 1 &&
         c.ensemble.members.front().label == cfg.name && c.ensemble.members.front().weight == 1.0;
}

inline void emit_config(YAML::Emitter& out, const RunConfig& cfg, bool with_outputs) {
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << cfg.name;
  out << YAML::Key << "tau_s" << YAML::Value << Num{cfg.tau_s};
  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "b_min_gauss" << YAML::Value << Num{cfg.grid.b_min_gauss};
  out << YAML::Key << "b_max_gauss" << YAML::Value << Num{cfg.grid.b_max_gauss};
  out << YAML::Key << "n_points" << YAML::Value << cfg.grid.n_points;
  out << YAML::Key << "direction" << YAML::Value;
  emit_vector(out, cfg.grid.direction);
  out << YAML::EndMap;
  if (with_outputs) {
    out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "derivative" << YAML::Value << cfg.outputs.derivative;
    out << YAML::Key << "crossings" << YAML::Value << cfg.outputs.crossings;
    out << YAML::Key << "per_center" << YAML::Value << cfg.outputs.per_center;
    out << YAML::Key << "path" << YAML::Value << cfg.outputs.path;
    out << YAML::EndMap;
  }
  if (is_shorthand(cfg)) {
    out << YAML::Key << "system" << YAML::Value;
    emit_system(out, cfg.components.front().ensemble.members.front().system);
  } else {
    out << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : cfg.components) {
      out << YAML::BeginMap;
      out << YAML::Key << "label" << YAML::Value << c.label;
      out << YAML::Key << "weight" << YAML::Value << Num{c.weight};
      out << YAML::Key << "members" << YAML::Value << YAML::BeginSeq;
      for (const auto& m : c.ensemble.members) {
        out << YAML::BeginMap;
        out << YAML::Key << "label" << YAML::Value << m.label;
        out << YAML::Key << "weight" << YAML::Value << Num{m.weight};
        out << YAML::Key << "system" << YAML::Value;
        emit_system(out, m.system);
        out << YAML::EndMap;
      }
      out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
}

inline std::string emit(const RunConfig& cfg, YamlStyle style, bool with_outputs) {
  YAML::Emitter out;
  if (style == YamlStyle::flow) {
    out.SetMapFormat(YAML::Flow);
    out.SetSeqFormat(YAML::Flow);
  }
  emit_config(out, cfg, with_outputs);
  if (!out.good()) throw NumericalError("yaml emitter: " + out.GetLastError());
  return out.c_str();
}

}  // namespace config_detail

/// Canonical YAML for a config; parse_config(to_yaml(c)) == c.
inline std::string to_yaml(const RunConfig& cfg, YamlStyle style = YamlStyle::block) {
  return config_detail::emit(cfg, style, true);
}

/// 64-bit FNV-1a of the canonical physical description (outputs excluded), as hex.
inline std::string config_hash(const RunConfig& cfg) {
  const std::string text = config_detail::emit(cfg, YamlStyle::flow, false);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lacsim
