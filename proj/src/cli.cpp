#include "abring/cli.hpp"

#include "abring/config.hpp"
#include "abring/errors.hpp"
#include "abring/svg_plot.hpp"
#include "abring/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <iostream>
#include <optional>

namespace abring {

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  bool plot = false;
  bool ldos = false;
  bool strict = false;
  std::optional<int> workers;
  std::vector<std::string> overrides;
  std::string timestamp;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "Configuration file (key = value, sections)")->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", f.out_dir, "Output directory");
  cmd->add_option("--format", f.format, "Record format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--plot", f.plot, "Write SVG figures next to the data");
  cmd->add_flag("--ldos", f.ldos, "Include per-site LDOS columns");
  cmd->add_flag("--strict", f.strict, "Exit with status 1 if any grid point failed");
  cmd->add_option("-j,--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--set", f.overrides, "Override one key, e.g. --set params.t_ar=0.5 (repeatable)");
  cmd->add_option("--timestamp", f.timestamp, "Timestamp recorded in the manifest (default: now, UTC)");
}

SweepConfig build_config(Experiment experiment, const CommonFlags& f) {
  SweepConfig config = SweepConfig::preset();
  if (!f.config_path.empty()) apply_config_text(config, read_text_file(f.config_path));
  config.experiment = experiment;
  for (const auto& o : f.overrides) apply_override(config, o);
  if (f.out_dir) config.output.out_dir = *f.out_dir;
  if (f.format) config.output.format = *f.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  if (f.plot) config.output.plot = true;
  if (f.ldos) config.output.ldos = true;
  if (f.strict) config.output.strict = true;
  if (f.workers) config.workers = *f.workers;
  resolve_config(config);
  return config;
}

std::string flux_label(double flux) {
  const double ratio = flux / 3.14159265358979323846;
  char buf[32];
  if (std::abs(ratio) < 1e-12) return "0";
  if (std::abs(ratio - 1.0) < 1e-12) return "pi";
  std::snprintf(buf, sizeof buf, "%.3g pi", ratio);
  return buf;
}

void write_plot(const std::filesystem::path& path, const SvgResult& svg, RunManifest& manifest) {
  write_text_file(path, svg.svg);
  manifest.outputs.push_back(path.filename().string());
  manifest.extra["plot_dropped_points"][path.filename().string()] = svg.dropped_points;
}

void plot_triptych(const SweepConfig& config, const std::vector<ObservableRecord>& records,
                   const std::filesystem::path& dir, RunManifest& manifest) {
  const std::string fa = flux_label(config.flux_a);
  const std::string fb = flux_label(config.flux_b);
  PlotSpec t;
  t.title = "Transmission";
  t.x_label = "E";
  t.y_label = "T";
  t.series = {{"energy", "T_bare_a", "no SC, flux " + fa, SeriesRole::Bare, false},
              {"energy", "T_full_a", "with SC, flux " + fa, SeriesRole::Coupled, false},
              {"energy", "T_bare_b", "no SC, flux " + fb, SeriesRole::Bare, true},
              {"energy", "T_full_b", "with SC, flux " + fb, SeriesRole::Coupled, true}};
  write_plot(dir / "transmission.svg", render_line_plot(records, t), manifest);

  PlotSpec c;
  c.title = "Contrast";
  c.x_label = "E";
  c.y_label = "C";
  c.series = {{"energy", "C_bare", "no SC", SeriesRole::Bare, false},
              {"energy", "C_full", "with SC", SeriesRole::Coupled, false}};
  write_plot(dir / "contrast.svg", render_line_plot(records, c), manifest);

  // A site under the superconductor against its mirror image on the clean arm.
  const auto& g = config.device.geometry;
  const int n = g.n_ring;
  const int sc_site = g.sc_sites[g.sc_sites.size() / 2];
  const int clean = g.has_spacer() ? (config.ring_contact_start + g.my / 2 + n / 2) % n : (sc_site + n / 2) % n;
  PlotSpec l;
  l.title = "LDOS with SC, flux " + fa;
  l.x_label = "E";
  l.y_label = "LDOS";
  l.log_y = true;
  l.series = {{"energy", "site_" + std::to_string(sc_site), "site " + std::to_string(sc_site), SeriesRole::Coupled,
               false},
              {"energy", "site_" + std::to_string(clean), "site " + std::to_string(clean), SeriesRole::Other, false}};
  write_plot(dir / "ldos.svg", render_line_plot(records, l), manifest);
}

void plot_contrast_sweep(const std::vector<ObservableRecord>& records, const std::filesystem::path& dir,
                         RunManifest& manifest) {
  PlotSpec c;
  c.title = "Contrast vs t_AR";
  c.x_label = "t_AR";
  c.y_label = "C";
  c.series = {{"t_ar", "C_full", "with SC", SeriesRole::Coupled, false},
              {"t_ar", "C_bare", "no SC", SeriesRole::Bare, true}};
  write_plot(dir / "contrast_vs_tar.svg", render_line_plot(records, c), manifest);
}

void plot_dephasing(const SweepConfig& config, const DephasingSweep& sweep, const std::filesystem::path& dir,
                    RunManifest& manifest) {
  std::vector<XYSeries> series;
  for (int my : config.my_values) {
    XYSeries s;
    s.label = "My = " + std::to_string(my);
    for (const auto& r : sweep.records) {
      if (r.my != my) continue;
      s.x.push_back(r.mx);
      s.y.push_back(r.ok() ? r.rate : std::nan(""));
    }
    series.push_back(std::move(s));
  }
  XYSeries avg;
  avg.label = "My average";
  avg.role = SeriesRole::Coupled;
  for (const auto& p : sweep.averaged) {
    avg.x.push_back(p.mx);
    avg.y.push_back(p.mean_rate);
  }
  series.push_back(avg);

  // 1/Mx guide through the first averaged point inside the fit window.
  for (const auto& p : sweep.averaged) {
    if (p.mx < config.fit_mx_min || !(p.mean_rate > 0.0)) continue;
    XYSeries guide;
    guide.label = "1/Mx";
    guide.role = SeriesRole::Reference;
    guide.dashed = true;
    for (const auto& q : sweep.averaged) {
      if (q.mx < config.fit_mx_min || q.mx > config.fit_mx_max) continue;
      guide.x.push_back(q.mx);
      guide.y.push_back(p.mean_rate * p.mx / q.mx);
    }
    series.push_back(std::move(guide));
    break;
  }

  PlotSpec spec;
  spec.title = "Dephasing rate vs spacer length";
  spec.x_label = "Mx";
  spec.y_label = "rate";
  spec.log_x = true;
  spec.log_y = true;
  write_plot(dir / "dephasing_vs_mx.svg", render_svg(series, spec), manifest);
}

std::string averaged_csv(const std::vector<AveragedPoint>& averaged) {
  std::string out = "mx,mean_rate,n_used,n_excluded\n";
  for (const auto& p : averaged) {
    out += std::to_string(p.mx) + "," + format_double(p.mean_rate) + "," + std::to_string(p.n_used) + "," +
           std::to_string(p.n_excluded) + "\n";
  }
  return out;
}

int run_experiment(Experiment experiment, const CommonFlags& flags) {
  SweepConfig config;
  try {
    config = build_config(experiment, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const SweepOutcome outcome = run_sweep(config);
    const RunManifest manifest =
        write_outputs(config, outcome, flags.timestamp.empty() ? utc_timestamp() : flags.timestamp);

    if (experiment == Experiment::SinglePoint && !outcome.records.empty()) {
      std::cout << records_to_json(outcome.records, config.output.ldos).at(0).dump(2) << "\n";
    }
    std::cout << experiment_name(experiment) << ": " << outcome.records.size() << " points, "
              << outcome.error_count << " failed, " << outcome.flagged_count << " flagged, "
              << outcome.undefined_contrast_count << " with undefined contrast -> "
              << config.output.out_dir << "\n";
    if (outcome.dephasing) {
      const SlopeFit& fit = outcome.dephasing->fit;
      std::cout << "log-log slope over Mx in [" << config.fit_mx_min << ", " << config.fit_mx_max
                << "]: " << fit.slope << " (" << fit.n_points << " points)\n";
    }
    if (manifest.extra.contains("plot_dropped_points")) {
      for (const auto& [file, dropped] : manifest.extra["plot_dropped_points"].items()) {
        if (dropped.get<int>() > 0) std::cerr << "note: " << file << ": " << dropped << " undrawable points left out\n";
      }
    }
    for (const auto& [index, what] : manifest.errors) {
      std::cerr << "point " << index << ": " << what << "\n";
    }
    if (config.output.strict && outcome.error_count > 0) return kExitPointErrors;
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPointErrors;
  }
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest write_outputs(const SweepConfig& config, const SweepOutcome& outcome, const std::string& timestamp) {
  const std::filesystem::path dir = config.output.out_dir;
  const char* ext = config.output.format == OutputFormat::Json ? "json" : "csv";
  RunManifest manifest =
      write_records(outcome.records, config.output.format, dir / (std::string("records.") + ext), config.output.ldos);
  manifest.config = describe_config(config);
  manifest.version = kVersion;
  manifest.timestamp = timestamp;

  if (outcome.dephasing) {
    const DephasingSweep& d = *outcome.dephasing;
    write_text_file(dir / "dephasing_avg.csv", averaged_csv(d.averaged));
    manifest.outputs.push_back("dephasing_avg.csv");
    nlohmann::ordered_json avg = nlohmann::ordered_json::array();
    for (const auto& p : d.averaged) {
      avg.push_back({{"mx", p.mx},
                     {"mean_rate", std::isfinite(p.mean_rate) ? nlohmann::ordered_json(p.mean_rate) : nullptr},
                     {"n_used", p.n_used},
                     {"n_excluded", p.n_excluded}});
    }
    manifest.extra["averaged"] = avg;
    manifest.extra["fit"] = {{"mx_min", config.fit_mx_min},
                             {"mx_max", config.fit_mx_max},
                             {"slope", std::isfinite(d.fit.slope) ? nlohmann::ordered_json(d.fit.slope) : nullptr},
                             {"intercept", std::isfinite(d.fit.intercept) ? nlohmann::ordered_json(d.fit.intercept)
                                                                           : nullptr},
                             {"n_points", d.fit.n_points},
                             {"n_excluded", d.fit.n_excluded}};
  }

  if (config.output.plot) {
    switch (config.experiment) {
      case Experiment::EnergyTriptych: plot_triptych(config, outcome.records, dir, manifest); break;
      case Experiment::ContrastVsTar: plot_contrast_sweep(outcome.records, dir, manifest); break;
      case Experiment::DephasingVsMx:
        if (outcome.dephasing) plot_dephasing(config, *outcome.dephasing, dir, manifest);
        break;
      case Experiment::SinglePoint: break;
    }
  }

  manifest.outputs.push_back("manifest.json");
  write_text_file(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Aharonov-Bohm ring transport with an Andreev self-energy"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    Experiment experiment;
  };
  const Command commands[] = {
      {"triptych", "Transmission, contrast and LDOS over the energy grid", Experiment::EnergyTriptych},
      {"contrast-sweep", "Contrast at fixed energy while t_AR varies", Experiment::ContrastVsTar},
      {"dephasing-sweep", "Dephasing rate over spacer sizes with the My average and log-log fit",
       Experiment::DephasingVsMx},
      {"point", "All observables at a single energy", Experiment::SinglePoint},
  };

  CommonFlags flags;
  int status = kExitOk;
  for (const auto& c : commands) {
    CLI::App* cmd = app.add_subcommand(c.name, c.help);
    add_common(cmd, flags);
    const Experiment e = c.experiment;
    cmd->callback([&status, &flags, e] { status = run_experiment(e, flags); });
  }

  int selftest_workers = 1;
  CLI::App* selftest = app.add_subcommand("selftest", "Run the built-in consistency checks");
  selftest->add_option("-j,--workers", selftest_workers, "Worker threads")->check(CLI::PositiveNumber);
  selftest->callback([&status, &selftest_workers] {
    try {
      const auto reports = verify::run_selftest(selftest_workers);
      std::cout << verify::format_report_table(reports);
      bool ok = true;
      for (const auto& r : reports) ok = ok && r.passed;
      status = ok ? kExitOk : kExitPointErrors;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      status = kExitPointErrors;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  return status;
}

}  // namespace abring
