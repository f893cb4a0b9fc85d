#pragma once

#include <string>
#include <vector>

#include "lacsim/spectrum.hpp"

namespace lacsim {

/// One orientation ensemble and its weight in the composed spectrum.
struct Component {
  std::string label;
  double weight = 1.0;
  OrientationEnsemble ensemble;

  bool operator==(const Component&) const = default;
};

struct OutputOptions {
  bool derivative = false;
  bool crossings = false;
  bool per_center = false;
  std::string path;  // empty: standard output

  bool operator==(const OutputOptions&) const = default;
};

struct RunConfig {
  std::string name;
  std::vector<Component> components;
  FieldGrid grid;
  double tau_s = units::kDefaultTauSeconds;
  OutputOptions outputs;

  // Bookkeeping, not part of the physical description.
  bool tau_defaulted = false;

  /// Equality over everything that affects the computed spectrum and outputs.
  bool operator==(const RunConfig& o) const {
    return name == o.name && components == o.components && grid == o.grid && tau_s == o.tau_s &&
           outputs == o.outputs;
  }

  int max_dimension() const {
    int d = 0;
    for (const auto& c : components) {
      for (const auto& m : c.ensemble.members) d = std::max(d, m.system.dimension());
    }
    return d;
  }
};

inline void validate(const RunConfig& cfg) {
  if (cfg.components.empty()) throw ValidationError("config defines no components");
  validate(cfg.grid);
  require_positive_tau(cfg.tau_s);
  for (const auto& c : cfg.components) {
    if (!std::isfinite(c.weight)) throw ValidationError("component '" + c.label + "' weight is not finite");
    validate(c.ensemble);
  }
}

/// Spectrum for a whole config: each component's orientation average,
/// composed with the component weights.
inline Spectrum run(const RunConfig& cfg, const SweepOptions& options = {}) {
  validate(cfg);
  std::vector<std::pair<Spectrum, double>> parts;
  for (const auto& c : cfg.components) {
    Spectrum s = orientation_average(c.ensemble, cfg.grid, cfg.tau_s, options);
    s.set_meta("label", c.label);
    parts.emplace_back(std::move(s), c.weight);
  }
  Spectrum out = compose(parts);
  out.set_meta("dimension", std::to_string(cfg.max_dimension()));
  out.set_meta("tau_s", detail::format_number(cfg.tau_s));
  return out;
}

}  // namespace lacsim
