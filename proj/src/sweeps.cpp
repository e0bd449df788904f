#include "abring/sweeps.hpp"

#include "abring/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace abring {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs task(i) for i in [0, n) on `workers` threads. Each task writes only its
// own slot, so the merged output is in index order whatever the schedule.
template <class Task>
void parallel_for(std::size_t n, int workers, Task&& task) {
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, n == 0 ? 1 : n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void poison(ObservableRecord& r, const std::string& why) {
  r.t_bare_a = r.t_bare_b = r.t_full_a = r.t_full_b = kNaN;
  r.c_bare = r.c_full = kNaN;
  r.dephasing = Complex(kNaN, kNaN);
  r.rate = kNaN;
  r.error_flag = 1;
  r.error = why;
  r.ldos.clear();
}

}  // namespace

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::EnergyTriptych: return "energy_triptych";
    case Experiment::ContrastVsTar: return "contrast_vs_tar";
    case Experiment::DephasingVsMx: return "dephasing_vs_mx";
    case Experiment::SinglePoint: return "single_point";
  }
  return "unknown";
}

double EnergyGrid::at(int k) const {
  if (n_points == 1) return e_min;
  return e_min + (e_max - e_min) * static_cast<double>(k) / static_cast<double>(n_points - 1);
}

SweepConfig SweepConfig::preset() {
  SweepConfig c;
  for (int k = 0; k <= 150; ++k) c.t_ar_values.push_back(0.02 * k);
  for (int mx = 1; mx <= 20; ++mx) c.mx_values.push_back(mx);
  c.my_values = {6, 14, 22, 30};
  return c;
}

void SweepConfig::validate() const {
  device.geometry.validate();
  device.params.validate();
  device.coupling.validate();
  if (!(device.gamma_i > 0.0) || !(device.gamma_ii > 0.0)) throw ParameterError("lead couplings must be > 0");
  if (grid.n_points < 1) throw ParameterError("energy grid needs n_points >= 1");
  if (!std::isfinite(grid.e_min) || !std::isfinite(grid.e_max) || grid.e_min > grid.e_max) {
    throw ParameterError("energy grid needs finite e_min <= e_max");
  }
  if (!std::isfinite(energy) || !std::isfinite(flux_a) || !std::isfinite(flux_b)) {
    throw ParameterError("energy and fluxes must be finite");
  }
  for (double t : t_ar_values) {
    if (!std::isfinite(t) || t < 0.0) throw ParameterError("t_ar_values must be finite and >= 0");
  }
  if (experiment == Experiment::ContrastVsTar && t_ar_values.empty()) {
    throw ParameterError("t_ar_values must not be empty for the t_AR sweep");
  }
  if (experiment == Experiment::DephasingVsMx) {
    if (mx_values.empty() || my_values.empty()) throw ParameterError("mx_values and my_values must not be empty");
    for (int v : mx_values) {
      if (v < 1) throw ParameterError("mx_values must be >= 1 for spacer experiments");
    }
    for (int v : my_values) {
      if (v < 1) throw ParameterError("my_values must be >= 1 for spacer experiments");
    }
    if (std::set<int>(mx_values.begin(), mx_values.end()).size() != mx_values.size() ||
        std::set<int>(my_values.begin(), my_values.end()).size() != my_values.size()) {
      throw ParameterError("mx_values and my_values must not repeat");
    }
    for (int my : my_values) spacer_geometry(*this, mx_values.front(), my).validate();
  }
  if (fit_mx_min > fit_mx_max) throw ParameterError("fit_mx_min must not exceed fit_mx_max");
  if (workers < 1) throw ParameterError("workers must be >= 1");
}

ObservableRecord evaluate_record(const Device& device, double energy, double flux_a, double flux_b) {
  ObservableRecord r;
  r.energy = energy;
  r.flux_a = flux_a;
  r.flux_b = flux_b;
  r.t_ar = device.coupling.t_ar;
  r.mx = device.geometry.mx;
  r.my = device.geometry.my;
  try {
    const PointSolver solver(device);
    const PointResult a = solver.evaluate(energy, flux_a);
    const PointResult b = solver.evaluate(energy, flux_b);
    r.t_bare_a = a.transmission_bare;
    r.t_bare_b = b.transmission_bare;
    r.t_full_a = a.transmission_full;
    r.t_full_b = b.transmission_full;
    r.dephasing = a.dephasing.ratio;
    r.rate = a.dephasing.rate();
    r.ldos = a.ldos_full;
    if (a.flagged || b.flagged) r.error_flag = 2;
    // Outside the band both transmissions vanish; the point keeps its other
    // observables and only the contrast is left undefined.
    try {
      r.c_bare = contrast_from_transmissions(r.t_bare_a, r.t_bare_b);
    } catch (const UndefinedContrastError& e) {
      r.c_bare = std::numeric_limits<double>::quiet_NaN();
      r.error = std::string("C_bare: ") + e.what();
      r.error_flag = 3;
    }
    try {
      r.c_full = contrast_from_transmissions(r.t_full_a, r.t_full_b);
    } catch (const UndefinedContrastError& e) {
      r.c_full = std::numeric_limits<double>::quiet_NaN();
      r.error = r.error.empty() ? std::string("C_full: ") + e.what() : r.error + "; C_full";
      r.error_flag = 3;
    }
  } catch (const Error& e) {
    poison(r, e.what());
  }
  return r;
}

std::vector<ObservableRecord> run_energy_triptych(const SweepConfig& config) {
  std::vector<ObservableRecord> out(static_cast<std::size_t>(config.grid.n_points));
  parallel_for(out.size(), config.workers, [&](std::size_t k) {
    out[k] = evaluate_record(config.device, config.grid.at(static_cast<int>(k)), config.flux_a, config.flux_b);
  });
  return out;
}

std::vector<ObservableRecord> run_contrast_vs_tar(const SweepConfig& config) {
  std::vector<ObservableRecord> out(config.t_ar_values.size());
  parallel_for(out.size(), config.workers, [&](std::size_t k) {
    Device d = config.device;
    d.coupling.t_ar = config.t_ar_values[k];
    out[k] = evaluate_record(d, config.energy, config.flux_a, config.flux_b);
  });
  return out;
}

std::vector<ObservableRecord> run_single_point(const SweepConfig& config) {
  return {evaluate_record(config.device, config.energy, config.flux_a, config.flux_b)};
}

Geometry spacer_geometry(const SweepConfig& config, int mx, int my) {
  Geometry g = config.device.geometry;
  g.mx = mx;
  g.my = my;
  g.ring_contact_sites.clear();
  for (int m = 0; m < my; ++m) g.ring_contact_sites.push_back(config.ring_contact_start + m);
  g.sc_sites = last_column_sites(g);
  return g;
}

DephasingSweep run_dephasing_vs_mx(const SweepConfig& config) {
  struct Cell {
    int mx;
    int my;
  };
  std::vector<Cell> cells;
  for (int my : config.my_values) {
    for (int mx : config.mx_values) cells.push_back({mx, my});
  }

  DephasingSweep sweep;
  sweep.records.resize(cells.size());
  parallel_for(cells.size(), config.workers, [&](std::size_t k) {
    Device d = config.device;
    try {
      d.geometry = spacer_geometry(config, cells[k].mx, cells[k].my);
      sweep.records[k] = evaluate_record(d, config.energy, config.flux_a, config.flux_b);
    } catch (const Error& e) {
      ObservableRecord r;
      r.energy = config.energy;
      r.flux_a = config.flux_a;
      r.flux_b = config.flux_b;
      r.t_ar = d.coupling.t_ar;
      r.mx = cells[k].mx;
      r.my = cells[k].my;
      poison(r, e.what());
      sweep.records[k] = r;
    }
  });
  sweep.averaged = my_average(sweep.records);
  sweep.fit = loglog_slope(sweep.averaged, config.fit_mx_min, config.fit_mx_max);
  return sweep;
}

std::vector<AveragedPoint> my_average(const std::vector<ObservableRecord>& records) {
  std::map<int, std::vector<const ObservableRecord*>> by_mx;
  for (const auto& r : records) by_mx[r.mx].push_back(&r);

  std::optional<std::multiset<int>> expected;
  std::vector<AveragedPoint> series;
  for (const auto& [mx, group] : by_mx) {
    std::multiset<int> mys;
    for (const auto* r : group) mys.insert(r->my);
    if (!expected) expected = mys;
    if (mys != *expected || std::set<int>(mys.begin(), mys.end()).size() != mys.size()) {
      throw AggregationError("ragged grouping: mx = " + std::to_string(mx) + " does not carry the same my values");
    }
    AveragedPoint p;
    p.mx = mx;
    double sum = 0.0;
    for (const auto* r : group) {
      if (r->ok() && std::isfinite(r->rate)) {
        sum += r->rate;
        ++p.n_used;
      } else {
        ++p.n_excluded;
      }
    }
    p.mean_rate = p.n_used > 0 ? sum / p.n_used : kNaN;
    series.push_back(p);
  }
  return series;
}

SlopeFit loglog_slope(const std::vector<AveragedPoint>& series, int mx_min, int mx_max) {
  SlopeFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : series) {
    if (p.mx < mx_min || p.mx > mx_max) continue;
    if (!(p.mean_rate > 0.0) || !std::isfinite(p.mean_rate)) {
      ++fit.n_excluded;
      continue;
    }
    xs.push_back(std::log(static_cast<double>(p.mx)));
    ys.push_back(std::log(p.mean_rate));
  }
  fit.n_points = static_cast<int>(xs.size());
  if (fit.n_points < 2) {
    fit.slope = fit.intercept = kNaN;
    return fit;
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mean_x = sx / n;
  const double mean_y = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  if (sxx == 0.0) {
    fit.slope = fit.intercept = kNaN;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  return fit;
}

SweepOutcome run_sweep(const SweepConfig& config) {
  config.validate();
  SweepOutcome out;
  switch (config.experiment) {
    case Experiment::EnergyTriptych: out.records = run_energy_triptych(config); break;
    case Experiment::ContrastVsTar: out.records = run_contrast_vs_tar(config); break;
    case Experiment::SinglePoint: out.records = run_single_point(config); break;
    case Experiment::DephasingVsMx:
      out.dephasing = run_dephasing_vs_mx(config);
      out.records = out.dephasing->records;
      break;
  }
  for (const auto& r : out.records) {
    if (r.error_flag == 1) ++out.error_count;
    if (r.error_flag == 2) ++out.flagged_count;
    if (r.error_flag == 3) ++out.undefined_contrast_count;
  }
  return out;
}

}  // namespace abring
