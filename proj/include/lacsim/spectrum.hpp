#pragma once

// Field sweeps of the averaged bright-state population, orientation
// ensembles, weighted composition, numerical derivatives and level-crossing
// search.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lacsim/evolution.hpp"
#include "lacsim/parallel.hpp"

namespace lacsim {

struct FieldGrid {
  double b_min_gauss = 0.0;
  double b_max_gauss = 1200.0;
  int n_points = 2401;
  Vector3 direction = Vector3::UnitZ();

  bool operator==(const FieldGrid&) const = default;

  double step() const { return (b_max_gauss - b_min_gauss) / (n_points - 1); }

  double field(int i) const {
    if (i == n_points - 1) return b_max_gauss;
    return b_min_gauss + (b_max_gauss - b_min_gauss) * static_cast<double>(i) / (n_points - 1);
  }

  FieldPoint point(int i) const { return FieldPoint{field(i) * direction}; }
  FieldPoint point_at(double b_gauss) const { return FieldPoint{b_gauss * direction}; }

  std::vector<double> fields() const {
    std::vector<double> out(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) out[static_cast<std::size_t>(i)] = field(i);
    return out;
  }
};

inline void validate(const FieldGrid& g) {
  if (!std::isfinite(g.b_min_gauss) || !std::isfinite(g.b_max_gauss)) {
    throw ValidationError("grid bounds must be finite");
  }
  if (!(g.b_min_gauss < g.b_max_gauss)) throw ValidationError("grid requires b_min < b_max");
  if (g.n_points < 2) throw ValidationError("grid requires n_points >= 2");
  require_unit(g.direction, "grid field direction");
}

struct Trace {
  std::string name;
  std::vector<double> values;

  bool operator==(const Trace&) const = default;
};

/// Sampled <rho00>(B0). `values` is the sum over bright centers; per-center
/// populations are kept as named traces ("center1", "center2").
struct Spectrum {
  std::vector<double> fields;
  std::vector<double> values;
  std::vector<Trace> traces;
  std::vector<std::pair<std::string, std::string>> metadata;

  const Trace* trace(const std::string& name) const {
    for (const auto& t : traces) {
      if (t.name == name) return &t;
    }
    return nullptr;
  }

  void set_meta(const std::string& key, const std::string& value) {
    for (auto& kv : metadata) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    metadata.emplace_back(key, value);
  }

  std::string meta(const std::string& key) const {
    for (const auto& kv : metadata) {
      if (kv.first == key) return kv.second;
    }
    return {};
  }
};

struct EnsembleMember {
  std::string label;
  double weight = 1.0;
  SpinSystem system;

  bool operator==(const EnsembleMember&) const = default;
};

struct OrientationEnsemble {
  std::vector<EnsembleMember> members;

  bool operator==(const OrientationEnsemble&) const = default;
};

inline void validate(const OrientationEnsemble& e) {
  if (e.members.empty()) throw ValidationError("orientation ensemble has no members");
  for (const auto& m : e.members) {
    if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) {
      throw ValidationError("ensemble member '" + m.label + "' has an invalid weight");
    }
    validate(m.system);
  }
}

struct SweepOptions {
  unsigned threads = 0;  // 0: one worker per hardware thread
};

namespace detail {

inline std::string format_number(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

inline std::string describe(const SpinSystem& s) {
  std::string out = s.center1.label.empty() ? "center1" : s.center1.label;
  if (s.center2) out += "/" + (s.center2->label.empty() ? std::string("center2") : s.center2->label);
  return out;
}

}  // namespace detail

/// <rho00> at every grid point for one system.
inline Spectrum sweep(const SpinSystem& system, const FieldGrid& grid, double tau_s,
                      const SweepOptions& options = {}) {
  validate(grid);
  require_positive_tau(tau_s);
  const HamiltonianModel model = build_model(system);
  const DensityMatrix rho0 = initial_density(system);
  const std::vector<BrightProjector> projectors = bright_projectors(system);

  const auto n = static_cast<std::size_t>(grid.n_points);
  std::vector<std::vector<double>> per_point(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    const double b = grid.field(static_cast<int>(i));
    try {
      const EigenSystem es = eigen_decompose(model.at(grid.point(static_cast<int>(i))));
      per_point[i] = averaged_populations(rho0, es, projectors, tau_s);
    } catch (const std::exception& e) {
      throw NumericalError("at B0 = " + detail::format_number(b) + " G: " + e.what());
    }
  });

  Spectrum out;
  out.fields = grid.fields();
  out.values.assign(n, 0.0);
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    Trace t{"center" + std::to_string(projectors[k].center + 1), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      t.values[i] = per_point[i][k];
      out.values[i] += per_point[i][k];
    }
    out.traces.push_back(std::move(t));
  }
  out.set_meta("system", detail::describe(system));
  out.set_meta("dimension", std::to_string(system.dimension()));
  out.set_meta("tau_s", detail::format_number(tau_s));
  return out;
}

/// Weighted pointwise sum. Traces are kept when every input carries them.
inline Spectrum compose(const std::vector<std::pair<Spectrum, double>>& parts) {
  if (parts.empty()) throw ValidationError("compose needs at least one spectrum");
  const Spectrum& first = parts.front().first;
  Spectrum out;
  out.fields = first.fields;
  out.values.assign(first.values.size(), 0.0);
  for (const auto& t : first.traces) {
    bool everywhere = true;
    for (const auto& [s, w] : parts) everywhere = everywhere && s.trace(t.name) != nullptr;
    if (everywhere) out.traces.push_back(Trace{t.name, std::vector<double>(first.values.size(), 0.0)});
  }
  std::string components;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& [s, w] = parts[p];
    if (s.fields.size() != first.fields.size() || s.values.size() != s.fields.size()) {
      throw ValidationError("compose: spectra are sampled on different grids");
    }
    for (std::size_t i = 0; i < s.fields.size(); ++i) {
      if (std::abs(s.fields[i] - first.fields[i]) > 1e-9 * std::max(1.0, std::abs(first.fields[i]))) {
        throw ValidationError("compose: spectra are sampled on different grids");
      }
    }
    if (!std::isfinite(w)) throw ValidationError("compose: weight is not finite");
    for (std::size_t i = 0; i < s.values.size(); ++i) out.values[i] += w * s.values[i];
    for (auto& t : out.traces) {
      const Trace* src = s.trace(t.name);
      for (std::size_t i = 0; i < t.values.size(); ++i) t.values[i] += w * src->values[i];
    }
    const std::string label = s.meta("label").empty() ? s.meta("system") : s.meta("label");
    if (p > 0) components += "; ";
    components += (label.empty() ? "spectrum" + std::to_string(p) : label) + "=" + detail::format_number(w);
  }
  out.metadata = first.metadata;
  out.set_meta("label", "composite");
  out.set_meta("components", components);
  return out;
}

/// Weighted sum of member sweeps (weights are used as given, not normalized).
inline Spectrum orientation_average(const OrientationEnsemble& ensemble, const FieldGrid& grid,
                                    double tau_s, const SweepOptions& options = {}) {
  validate(ensemble);
  std::vector<std::pair<Spectrum, double>> parts;
  parts.reserve(ensemble.members.size());
  for (const auto& m : ensemble.members) {
    Spectrum s = sweep(m.system, grid, tau_s, options);
    s.set_meta("label", m.label.empty() ? s.meta("system") : m.label);
    parts.emplace_back(std::move(s), m.weight);
  }
  Spectrum out = compose(parts);
  out.set_meta("label", "orientation_average");
  return out;
}

/// dy/dB in 1/G: central differences inside, second-order one-sided at the ends.
inline std::vector<double> differentiate(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw ValidationError("derivative needs at least 3 matching samples");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);
  d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (x[2] - x[0]);
  d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (x[n - 1] - x[n - 3]);
  return d;
}

inline Spectrum derivative(const Spectrum& spec) {
  Spectrum out;
  out.fields = spec.fields;
  out.values = differentiate(spec.fields, spec.values);
  for (const auto& t : spec.traces) out.traces.push_back(Trace{t.name, differentiate(spec.fields, t.values)});
  out.metadata = spec.metadata;
  out.set_meta("quantity", "d<rho00>/dB0 [1/G]");
  return out;
}

// ---------------------------------------------------------------------------
// Level crossings

struct Crossing {
  double field_gauss = 0.0;
  int lower = 0;  // index of the lower level in ascending order
  int upper = 0;
  double min_gap_mhz = 0.0;
  bool avoided = false;  // true when min gap >= gap floor (a LAC)
};

/// Context handed to a level-pair filter: bright (Ms = 0 of center 1)
/// character of both levels at the two grid points bracketing the minimum,
/// and of the lower/upper level at the minimum itself.
struct LevelPairInfo {
  int lower = 0;
  int upper = 0;
  double field_gauss = 0.0;
  std::array<double, 2> bright_lower{};
  std::array<double, 2> bright_upper{};
  std::array<double, 2> bright_at_min{};
};

using LevelPairFilter = std::function<bool(const LevelPairInfo&)>;

/// Accepts pairs where one level is bright and the other dark on either side,
/// or where the two levels share one bright state at the minimum (a broad
/// anticrossing that is still mixed at the neighbouring grid points).
inline LevelPairFilter bright_dark_filter(double contrast = 0.5) {
  return [contrast](const LevelPairInfo& p) {
    for (int side = 0; side < 2; ++side) {
      if (std::abs(p.bright_lower[side] - p.bright_upper[side]) > contrast) return true;
    }
    const double lo = p.bright_at_min[0];
    const double hi = p.bright_at_min[1];
    return std::min(lo, hi) > 0.5 * (1.0 - contrast) && std::abs(lo + hi - 1.0) < contrast;
  };
}

struct CrossingOptions {
  double gap_threshold_mhz = 10.0;
  double gap_floor_mhz = 1e-3;
  LevelPairFilter filter;  // empty: accept every adjacent pair
  unsigned threads = 0;
};

namespace detail {

inline Eigen::VectorXd energies_at(const HamiltonianModel& model, const FieldPoint& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(model.at(b), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return solver.eigenvalues();
}

}  // namespace detail

/// Local minima of adjacent-level gaps along the grid, refined by golden-section
/// search between the neighbouring grid points and a final parabolic step.
inline std::vector<Crossing> find_crossings(const SpinSystem& system, const FieldGrid& grid,
                                            const CrossingOptions& options = {}) {
  validate(grid);
  const HamiltonianModel model = build_model(system);
  const auto n = static_cast<std::size_t>(grid.n_points);
  std::vector<Eigen::VectorXd> levels(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    levels[i] = detail::energies_at(model, grid.point(static_cast<int>(i)));
  });

  const int dim = model.dimension();
  std::vector<Crossing> out;
  const BrightProjector bright = bright_projector(system, 0);
  auto bright_character = [&](double b) {
    const EigenSystem es = eigen_decompose(model.at(grid.point_at(b)));
    Eigen::VectorXd c(dim);
    for (int j = 0; j < dim; ++j) c(j) = (es.vectors.col(j).adjoint() * bright.mat * es.vectors.col(j))(0, 0).real();
    return c;
  };

  for (int pair = 0; pair + 1 < dim; ++pair) {
    auto gap = [&](std::size_t i) { return levels[i](pair + 1) - levels[i](pair); };
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double g = gap(k);
      if (!(g < gap(k - 1) && g <= gap(k + 1) && g < options.gap_threshold_mhz)) continue;

      auto gap_at = [&](double b) {
        const Eigen::VectorXd e = detail::energies_at(model, grid.point_at(b));
        return e(pair + 1) - e(pair);
      };
      double lo = grid.field(static_cast<int>(k) - 1);
      double hi = grid.field(static_cast<int>(k) + 1);
      const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = hi - ratio * (hi - lo);
      double x2 = lo + ratio * (hi - lo);
      double f1 = gap_at(x1);
      double f2 = gap_at(x2);
      for (int it = 0; it < 60 && hi - lo > 1e-9 * std::max(1.0, std::abs(hi)); ++it) {
        if (f1 <= f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - ratio * (hi - lo);
          f1 = gap_at(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + ratio * (hi - lo);
          f2 = gap_at(x2);
        }
      }
      double best = f1 <= f2 ? x1 : x2;
      double best_gap = std::min(f1, f2);
      // Parabolic vertex through the final bracket, kept only if it improves the gap.
      const double fl = gap_at(lo);
      const double fh = gap_at(hi);
      const double denom = (best - lo) * (best_gap - fh) - (best - hi) * (best_gap - fl);
      if (denom != 0.0) {
        const double num = (best - lo) * (best - lo) * (best_gap - fh) - (best - hi) * (best - hi) * (best_gap - fl);
        const double vertex = best - 0.5 * num / denom;
        if (vertex > lo && vertex < hi) {
          const double fv = gap_at(vertex);
          if (fv < best_gap) {
            best = vertex;
            best_gap = fv;
          }
        }
      }

      if (options.filter) {
        const Eigen::VectorXd before = bright_character(grid.field(static_cast<int>(k) - 1));
        const Eigen::VectorXd after = bright_character(grid.field(static_cast<int>(k) + 1));
        const Eigen::VectorXd at = bright_character(best);
        const LevelPairInfo info{pair, pair + 1, best, {before(pair), after(pair)},
                                 {before(pair + 1), after(pair + 1)}, {at(pair), at(pair + 1)}};
        if (!options.filter(info)) continue;
      }
      out.push_back(Crossing{best, pair, pair + 1, std::max(best_gap, 0.0),
                             best_gap >= options.gap_floor_mhz});
    }
  }
  std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) {
    return a.field_gauss != b.field_gauss ? a.field_gauss < b.field_gauss : a.lower < b.lower;
  });
  return out;
}

}  // namespace lacsim
