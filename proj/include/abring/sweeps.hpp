#pragma once

#include "abring/observables.hpp"

#include <optional>
#include <string>
#include <vector>

namespace abring {

enum class Experiment { EnergyTriptych, ContrastVsTar, DephasingVsMx, SinglePoint };

const char* experiment_name(Experiment e);

struct EnergyGrid {
  double e_min = -3.0;
  double e_max = 3.0;
  int n_points = 2001;

  double at(int k) const;
};

enum class OutputFormat { Csv, Json };

struct OutputOptions {
  std::string out_dir = "out";
  OutputFormat format = OutputFormat::Csv;
  bool ldos = false;
  bool plot = false;
  bool strict = false;
};

struct SweepConfig {
  Experiment experiment = Experiment::EnergyTriptych;
  // Ring, leads and couplings. device.coupling.t_ar is the coupling used by
  // every experiment except the t_AR sweep, which walks t_ar_values.
  Device device;
  EnergyGrid grid;
  double energy = 0.0;
  double flux_a = 3.14159265358979323846;
  double flux_b = 0.0;
  std::vector<double> t_ar_values;
  std::vector<int> mx_values;
  std::vector<int> my_values;
  int ring_contact_start = 20;
  int fit_mx_min = 2;
  int fit_mx_max = 20;
  int workers = 1;
  OutputOptions output;

  // Preset values for every field (t_ar = 0.2, E in [-3, 3] x 2001,
  // t_AR sweep 0..3 step 0.02, mx 1..20, my {6, 14, 22, 30}).
  static SweepConfig preset();
  void validate() const;
};

// One grid point. Transmissions are evaluated at both fluxes, with (full)
// and without (bare) the Andreev self-energy. LDOS and the dephasing ratio
// belong to the full stage at flux_a.
struct ObservableRecord {
  double energy = 0.0;
  double flux_a = 0.0;
  double flux_b = 0.0;
  double t_ar = 0.0;
  int mx = 0;
  int my = 0;
  double t_bare_a = 0.0;
  double t_bare_b = 0.0;
  double t_full_a = 0.0;
  double t_full_b = 0.0;
  double c_bare = 0.0;
  double c_full = 0.0;
  Complex dephasing{0.0, 0.0};
  double rate = 0.0;
  // 0 = ok, 1 = failed (see error), 2 = residual above tolerance,
  // 3 = contrast undefined because both transmissions vanish.
  int error_flag = 0;
  std::string error;
  std::vector<double> ldos;

  bool ok() const { return error_flag != 1; }
};

// Never throws for numerical failures: they become error-annotated records.
ObservableRecord evaluate_record(const Device& device, double energy, double flux_a, double flux_b);

std::vector<ObservableRecord> run_energy_triptych(const SweepConfig& config);
std::vector<ObservableRecord> run_contrast_vs_tar(const SweepConfig& config);
std::vector<ObservableRecord> run_single_point(const SweepConfig& config);

struct AveragedPoint {
  int mx = 0;
  double mean_rate = 0.0;
  int n_used = 0;
  int n_excluded = 0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  int n_points = 0;
  int n_excluded = 0;
};

struct DephasingSweep {
  std::vector<ObservableRecord> records;
  std::vector<AveragedPoint> averaged;
  SlopeFit fit;
};

// Geometry for one (mx, my) cell of the spacer sweep, derived from the
// configured ring.
Geometry spacer_geometry(const SweepConfig& config, int mx, int my);

DephasingSweep run_dephasing_vs_mx(const SweepConfig& config);

// Mean dephasing rate over my for each mx. Every mx must appear with the same
// set of my values.
std::vector<AveragedPoint> my_average(const std::vector<ObservableRecord>& records);

// Least squares on (log mx, log mean_rate) over mx in [mx_min, mx_max].
SlopeFit loglog_slope(const std::vector<AveragedPoint>& series, int mx_min, int mx_max);

struct SweepOutcome {
  std::vector<ObservableRecord> records;
  std::optional<DephasingSweep> dephasing;
  int error_count = 0;
  int flagged_count = 0;
  int undefined_contrast_count = 0;
};

SweepOutcome run_sweep(const SweepConfig& config);

}  // namespace abring
