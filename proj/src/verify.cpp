#include "abring/verify.hpp"

#include "abring/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

namespace abring::verify {

namespace {

constexpr double kGaugeTol = 1e-10;
constexpr double kFluxTol = 1e-9;
constexpr double kSumRuleTol = 0.02;
constexpr double kOracleTol = 1e-12;
// Quadrature error estimate above which the integral is not trusted.
constexpr double kQuadratureErrorTol = 1e-5;

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod on fixed sub-intervals. The inner window around the
// band is cut finely so that no resonance can slip between the first-level
// nodes; the tails are smooth Lorentzian decays.
Integral integrate_piecewise(const std::function<double(double)>& f, double lower, double upper, double band_lo,
                             double band_hi) {
  std::vector<double> cuts{lower};
  const double step = 0.25;
  for (double x = std::ceil(band_lo / step) * step; x < band_hi; x += step) {
    if (x > lower && x < upper) cuts.push_back(x);
  }
  cuts.push_back(upper);

  Integral total;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double err = 0.0;
    total.value +=
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 12, 1e-9, &err);
    total.error += err;
  }
  return total;
}

CheckReport sum_rule_report(std::string name, const std::function<double(double)>& rho, QuadratureBounds bounds,
                            double band_lo, double band_hi) {
  CheckReport rep;
  rep.name = std::move(name);
  rep.tolerance = kSumRuleTol;
  const Integral integral = integrate_piecewise(rho, bounds.lower, bounds.upper, band_lo, band_hi);
  const double deviation = std::abs(integral.value - 1.0);
  rep.measured = {{"integral", integral.value}, {"deviation", deviation}, {"quadrature_error", integral.error}};
  if (integral.error > kQuadratureErrorTol) {
    rep.passed = false;
    std::ostringstream msg;
    msg << "quadrature did not converge (error estimate " << integral.error << ")";
    rep.detail = msg.str();
    return rep;
  }
  rep.passed = deviation <= kSumRuleTol;
  std::ostringstream msg;
  msg << "integral over [" << bounds.lower << ", " << bounds.upper << "] = " << integral.value;
  rep.detail = msg.str();
  return rep;
}

CheckReport single_site_oracle_report() {
  CheckReport rep;
  rep.name = "single_site_oracle";
  rep.tolerance = kOracleTol;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double e = -1.0 + 2.0 * k / 49.0;
    worst = std::max(worst, std::abs(single_site_pipeline_transmission(0.2, 0.2, 0.0, e) -
                                     analytic_single_site(0.2, 0.2, 0.0, e)));
  }
  rep.measured = {{"max_deviation", worst}};
  rep.passed = worst <= kOracleTol;
  rep.detail = "50 energies in [-1, 1], gamma_i = gamma_ii = 0.2";
  return rep;
}

CheckReport zero_coupling_report() {
  CheckReport rep;
  rep.name = "zero_coupling_reduction";
  rep.tolerance = 1e-12;
  Device d;
  d.coupling.t_ar = 0.0;
  const PointSolver solver(d);
  double worst = 0.0;
  for (double e : {-2.5, -1.0, 0.0, 0.37, 1.9}) {
    for (double flux : {0.0, std::numbers::pi}) {
      const PointResult r = solver.evaluate(e, flux);
      worst = std::max(worst, std::abs(r.transmission_full - reference_bare_transmission(d, e, flux)));
    }
  }
  rep.measured = {{"max_deviation", worst}};
  rep.passed = worst <= rep.tolerance;
  rep.detail = "preset ring, t_ar = 0, pipeline vs direct reference";
  return rep;
}

double band_half_width(const Device& device) {
  const auto& p = device.params;
  if (!device.geometry.has_spacer()) return 2.0 * std::abs(p.t_ring);
  return 2.0 * std::abs(p.t_ring) + 2.0 * std::abs(p.t_x) + 2.0 * std::abs(p.t_y) + std::abs(p.t_x_prime);
}

}  // namespace

double analytic_single_site(double gamma_i, double gamma_ii, double eps0, double energy) {
  const double detuning = energy - eps0;
  const double half = 0.5 * (gamma_i + gamma_ii);
  return gamma_i * gamma_ii / (detuning * detuning + half * half);
}

double analytic_single_site_ldos(double gamma_i, double gamma_ii, double eps0, double energy) {
  const double gamma = gamma_i + gamma_ii;
  const double detuning = energy - eps0;
  return (gamma / (2.0 * std::numbers::pi)) / (detuning * detuning + 0.25 * gamma * gamma);
}

double single_site_pipeline_transmission(double gamma_i, double gamma_ii, double eps0, double energy) {
  HamiltonianMatrix h;
  h.entries = Matrix::Constant(1, 1, Complex(eps0, 0.0));
  const std::array<int, 1> site{0};
  const LeadBroadening b = build_lead_broadening(1, site, site, gamma_i, gamma_ii);
  const GreensFunctions g = bare_green(energy, h, lead_self_energy(b));
  return transmission(g, b);
}

double reference_bare_transmission(const Device& device, double energy, double flux) {
  TightBindingParams p = device.params;
  p.flux = flux;
  const HamiltonianMatrix h = assemble_total_hamiltonian(p, device.geometry);
  const int n = h.dim();
  Matrix gamma_i = Matrix::Zero(n, n);
  Matrix gamma_ii = Matrix::Zero(n, n);
  for (int s : device.geometry.lead_i_sites) gamma_i(s, s) = device.gamma_i;
  for (int s : device.geometry.lead_ii_sites) gamma_ii(s, s) = device.gamma_ii;
  const Complex i_unit(0.0, 1.0);
  const Matrix sigma = -i_unit * (gamma_i + gamma_ii) / 2.0;
  const Matrix g = (energy * Matrix::Identity(n, n) - h.entries - sigma).inverse();
  return (gamma_i * g * gamma_ii * g.adjoint()).trace().real();
}

CheckReport check_gauge_invariance(const Device& device, double energy, double flux) {
  CheckReport rep;
  rep.name = "gauge_invariance";
  rep.tolerance = kGaugeTol;
  Device d = device;
  const PointSolver distributed(d, PeierlsGauge::Distributed);
  const PointSolver concentrated(d, PeierlsGauge::Concentrated);
  const double t_dist = distributed.evaluate(energy, flux).transmission_full;
  const double t_conc = concentrated.evaluate(energy, flux).transmission_full;
  const double delta = std::abs(t_dist - t_conc);
  rep.measured = {{"T_distributed", t_dist}, {"T_concentrated", t_conc}, {"delta_T", delta}};
  rep.passed = delta <= kGaugeTol;
  std::ostringstream msg;
  msg << "E = " << energy << ", flux = " << flux << ", t_ar = " << device.coupling.t_ar;
  rep.detail = msg.str();
  return rep;
}

CheckReport check_flux_symmetry(const Device& device, double energy, double flux) {
  CheckReport rep;
  rep.name = "flux_symmetry";
  rep.tolerance = kFluxTol;
  const PointSolver solver(device);
  const double t = solver.evaluate(energy, flux).transmission_full;
  const double t_reversed = solver.evaluate(energy, -flux).transmission_full;
  const double t_shifted = solver.evaluate(energy, flux + 2.0 * std::numbers::pi).transmission_full;
  const double reversal = std::abs(t - t_reversed);
  const double period = std::abs(t - t_shifted);
  rep.measured = {{"reversal_deviation", reversal}, {"period_deviation", period}};
  rep.passed = reversal <= kFluxTol && period <= kFluxTol;
  std::ostringstream msg;
  msg << "E = " << energy << ", flux = " << flux << ", t_ar = " << device.coupling.t_ar
      << ", mx = " << device.geometry.mx << ", my = " << device.geometry.my;
  rep.detail = msg.str();
  return rep;
}

CheckReport check_sum_rule(const Device& device, int site, QuadratureBounds bounds) {
  if (device.coupling.t_ar != 0.0) {
    throw ArgumentError("sum rule check needs t_ar = 0 (energy-independent self-energy)");
  }
  const PointSolver solver(device);
  const HamiltonianMatrix h = solver.hamiltonian(device.params.flux);
  if (site < 0 || site >= h.dim()) throw IndexError("sum rule site outside device");
  auto rho = [&](double e) { return ldos(bare_green(e, h, solver.sigma_leads()), site); };
  const double half = band_half_width(device);
  const double center = device.params.eps_ring;
  return sum_rule_report("sum_rule_site_" + std::to_string(site), rho, bounds, center - half - 1.0,
                         center + half + 1.0);
}

std::vector<CheckReport> run_selftest(int /*workers*/) {
  std::vector<CheckReport> reports;
  reports.push_back(single_site_oracle_report());

  {
    // Single level with total broadening 0.4.
    auto rho = [](double e) {
      HamiltonianMatrix h;
      h.entries = Matrix::Zero(1, 1);
      const std::array<int, 1> site{0};
      const LeadBroadening b = build_lead_broadening(1, site, site, 0.2, 0.2);
      return ldos(bare_green(e, h, lead_self_energy(b)), 0);
    };
    reports.push_back(sum_rule_report("sum_rule_single_site", rho, {}, -1.0, 1.0));
  }

  Device ring;
  ring.coupling.t_ar = 0.0;
  reports.push_back(check_gauge_invariance(ring, 0.0, std::numbers::pi));

  Device ring_coupled;
  ring_coupled.coupling.t_ar = 0.2;
  reports.push_back(check_gauge_invariance(ring_coupled, 0.0, std::numbers::pi));
  reports.back().name = "gauge_invariance_coupled";

  // Reversal symmetry with the absorptive Andreev channel is exact at the
  // band centre; away from it only t_ar = 0 is reciprocal.
  reports.push_back(check_flux_symmetry(ring_coupled, 0.0, std::numbers::pi / 3.0));
  reports.push_back(check_flux_symmetry(ring, 0.37, std::numbers::pi / 3.0));
  reports.back().name = "flux_symmetry_uncoupled";

  Device spacer;
  spacer.geometry = Geometry::spacer_preset(3, 10);
  spacer.coupling.t_ar = 0.2;
  reports.push_back(check_flux_symmetry(spacer, 0.0, std::numbers::pi / 3.0));
  reports.back().name = "flux_symmetry_spacer";

  reports.push_back(check_sum_rule(ring, 0));
  reports.push_back(check_sum_rule(ring, 55));
  reports.push_back(zero_coupling_report());
  return reports;
}

std::string format_report_table(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-6s %-12s %s\n", "check", "status", "tolerance", "measured");
  out << line;
  for (const auto& r : reports) {
    std::ostringstream measured;
    for (std::size_t k = 0; k < r.measured.size(); ++k) {
      if (k) measured << ", ";
      measured << r.measured[k].first << "=" << r.measured[k].second;
    }
    std::snprintf(line, sizeof line, "%-28s %-6s %-12.3g ", r.name.c_str(), r.passed ? "pass" : "FAIL", r.tolerance);
    out << line << measured.str();
    if (!r.detail.empty()) out << "  (" << r.detail << ")";
    out << '\n';
  }
  return out.str();
}

}  // namespace abring::verify
