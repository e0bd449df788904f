#pragma once

#include "abring/observables.hpp"

#include <string>
#include <utility>
#include <vector>

namespace abring::verify {

struct CheckReport {
  std::string name;
  bool passed = false;
  // (label, measured deviation or value) in the order they were checked.
  std::vector<std::pair<std::string, double>> measured;
  double tolerance = 0.0;
  std::string detail;
};

// Breit-Wigner transmission of a single level coupled to two wide-band leads.
double analytic_single_site(double gamma_i, double gamma_ii, double eps0, double energy);

// Lorentzian LDOS of the same level: (gamma/2pi) / ((E - eps0)^2 + (gamma/2)^2),
// gamma = gamma_i + gamma_ii.
double analytic_single_site_ldos(double gamma_i, double gamma_ii, double eps0, double energy);

// Transmission of a one-site device through the greens/observables pipeline.
double single_site_pipeline_transmission(double gamma_i, double gamma_ii, double eps0, double energy);

// Independent zero-coupling reference: dense Gamma matrices, a direct inverse
// of E - H - Sigma_leads, and the literal trace. Does not touch the
// self-energy, greens or observables code.
double reference_bare_transmission(const Device& device, double energy, double flux);

CheckReport check_gauge_invariance(const Device& device, double energy, double flux);
CheckReport check_flux_symmetry(const Device& device, double energy, double flux);

struct QuadratureBounds {
  double lower = -60.0;
  double upper = 60.0;
};

// Integrates rho(site, E) over the bounds; needs t_ar = 0.
CheckReport check_sum_rule(const Device& device, int site, QuadratureBounds bounds = {});

// Every check at preset parameters, in declaration order.
std::vector<CheckReport> run_selftest(int workers = 1);

std::string format_report_table(const std::vector<CheckReport>& reports);

}  // namespace abring::verify
