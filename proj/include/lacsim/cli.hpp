#pragma once

// Command-line driver. Exit codes: 0 ok, 1 usage, 2 invalid input, 3 runtime failure.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "lacsim/config.hpp"
#include "lacsim/presets.hpp"
#include "lacsim/spectrum_io.hpp"

namespace lacsim {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInvalid = 2, kExitRuntime = 3 };

namespace cli_detail {

struct Args {
  std::string config_path;
  std::string preset;
  std::optional<double> b_min;
  std::optional<double> b_max;
  std::optional<int> points;
  std::optional<double> tau;
  std::string output;
  bool derivative = false;
  bool crossings = false;
  bool per_center = false;
  unsigned threads = 0;
  std::optional<unsigned long long> seed;
  bool list_presets = false;
  bool dump_config = false;
};

inline std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config '" + path + "': " + std::strerror(errno));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline RunConfig resolve(const Args& a) {
  RunConfig cfg = a.preset.empty() ? parse_config(read_file(a.config_path)) : presets::load_preset(a.preset);
  if (a.b_min) cfg.grid.b_min_gauss = *a.b_min;
  if (a.b_max) cfg.grid.b_max_gauss = *a.b_max;
  if (a.points) cfg.grid.n_points = *a.points;
  if (a.tau) {
    cfg.tau_s = *a.tau;
    cfg.tau_defaulted = false;
  }
  if (!a.output.empty()) cfg.outputs.path = a.output;
  cfg.outputs.derivative = cfg.outputs.derivative || a.derivative;
  cfg.outputs.crossings = cfg.outputs.crossings || a.crossings;
  cfg.outputs.per_center = cfg.outputs.per_center || a.per_center;
  validate(cfg);
  return cfg;
}

inline std::vector<LabeledCrossing> all_crossings(const RunConfig& cfg, unsigned threads) {
  std::vector<LabeledCrossing> rows;
  CrossingOptions opt;
  opt.filter = bright_dark_filter();
  opt.threads = threads;
  for (const auto& c : cfg.components) {
    for (const auto& m : c.ensemble.members) {
      const std::string label = cfg.components.size() > 1 ? c.label + "/" + m.label : m.label;
      for (const auto& x : find_crossings(m.system, cfg.grid, opt)) rows.push_back({label, x});
    }
  }
  return rows;
}

inline int execute(const Args& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve(a);
  if (a.dump_config) {
    out << to_yaml(cfg) << "\n";
    return kExitOk;
  }

  const auto t0 = std::chrono::steady_clock::now();
  Spectrum spec = run(cfg, SweepOptions{a.threads});
  annotate(spec, cfg);
  if (a.seed) spec.set_meta("seed", std::to_string(*a.seed));
  std::vector<LabeledCrossing> crossings;
  if (cfg.outputs.crossings) crossings = all_crossings(cfg, a.threads);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const ColumnOptions cols{cfg.outputs.derivative, cfg.outputs.per_center};
  const std::string& path = cfg.outputs.path;
  if (path.empty()) {
    write_spectrum(out, spec, cols);
    if (cfg.outputs.crossings) write_crossings(out, crossings);
  } else {
    write_spectrum(spec, path, cols);
    if (cfg.outputs.crossings) write_crossings(crossings, path + ".crossings.tsv");
  }

  std::ostream& summary = path.empty() ? err : out;
  std::ostringstream line;
  line.precision(3);
  line << std::fixed << "lacsim: " << cfg.name << " dim=" << cfg.max_dimension()
       << " points=" << cfg.grid.n_points << " wall=" << wall << " s";
  if (cfg.outputs.crossings) line << " crossings=" << crossings.size();
  if (!path.empty()) line << " -> " << path;
  summary << line.str() << "\n";
  return kExitOk;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  cli_detail::Args a;
  CLI::App app{"Level anti-crossing spectra of NV- centers and their partners in diamond", "lacsim"};
  auto* config = app.add_option("--config", a.config_path, "YAML run configuration");
  auto* preset = app.add_option("--preset", a.preset, "built-in system (see --list-presets)");
  config->excludes(preset);
  app.add_option("--b-min", a.b_min, "lowest field [G]");
  app.add_option("--b-max", a.b_max, "highest field [G]");
  app.add_option("--points", a.points, "number of field points");
  app.add_option("--tau", a.tau, "mean evolution time [s]");
  app.add_option("--output", a.output, "output TSV path (default: standard output)");
  app.add_flag("--derivative", a.derivative, "add d<rho00>/dB0 column");
  app.add_flag("--crossings", a.crossings, "also write the level-crossing table");
  app.add_flag("--per-center", a.per_center, "add per-center population columns");
  app.add_option("--threads", a.threads, "worker threads (0: all cores)");
  app.add_option("--seed", a.seed, "seed recorded in the output header");
  app.add_flag("--list-presets", a.list_presets, "print preset names and exit");
  app.add_flag("--dump-config", a.dump_config, "print the resolved config as YAML and exit");

  if (argc <= 1) {
    err << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "lacsim: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  if (a.list_presets) {
    for (const auto& n : presets::names()) out << n << "\n";
    return kExitOk;
  }
  if (a.config_path.empty() && a.preset.empty()) {
    err << "lacsim: one of --config or --preset is required\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    return cli_detail::execute(a, out, err);
  } catch (const ValidationError& e) {
    err << "lacsim: invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "lacsim: error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace lacsim
