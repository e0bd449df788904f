#pragma once

#include "abring/greens.hpp"
#include "abring/lattice.hpp"
#include "abring/selfenergy.hpp"

#include <vector>

namespace abring {

// T = Tr[Gamma^I G^R Gamma^II G^A]. The trace is formed in complex arithmetic
// and its imaginary part must vanish to 1e-10.
double transmission(const GreensFunctions& greens, const LeadBroadening& broadening);

// 2 |T_a - T_b| / (T_a + T_b). Throws UndefinedContrastError when both
// transmissions are below 1e-14.
double contrast_from_transmissions(double t_a, double t_b);

// rho(x) = A_xx
double ldos(const GreensFunctions& greens, int site);
std::vector<double> ldos_vector(const GreensFunctions& greens);

// R = Tr[Sigma_AR G^R Gamma^I G^A] / Tr[G^R Gamma^I G^A]. The dephasing rate
// (hbar = 1) is -2 Im R; -2 Re R is the Lamb-shift channel.
struct DephasingRatio {
  Complex ratio{0.0, 0.0};

  double rate() const { return -2.0 * ratio.imag(); }
  double lamb_shift() const { return -2.0 * ratio.real(); }
};

DephasingRatio dephasing_rate(const GreensFunctions& greens, const LeadBroadening& broadening,
                              const AndreevSelfEnergy& sigma_ar);

// Everything needed to evaluate one device at arbitrary (E, flux). The flux
// stored in params is a default only; evaluate() takes the flux explicitly.
struct Device {
  Geometry geometry = Geometry::ring_preset();
  TightBindingParams params;
  double gamma_i = 0.2;
  double gamma_ii = 0.2;
  AndreevCoupling coupling{0.2, 1.0, 1.0};
};

struct PointResult {
  double energy = 0.0;
  double flux = 0.0;
  double transmission_bare = 0.0;
  double transmission_full = 0.0;
  std::vector<double> ldos_full;
  DephasingRatio dephasing;
  double max_residual = 0.0;
  bool flagged = false;
};

// Runs the bare solve, the Andreev self-energy, and the full solve at one
// point. Construction validates the device and fixes the lead broadening.
class PointSolver {
 public:
  explicit PointSolver(Device device, PeierlsGauge gauge = PeierlsGauge::Distributed);

  const Device& device() const { return device_; }
  const LeadBroadening& broadening() const { return broadening_; }
  const Matrix& sigma_leads() const { return sigma_leads_; }

  HamiltonianMatrix hamiltonian(double flux) const;
  PointResult evaluate(double energy, double flux) const;

  // Contrast between two fluxes at one energy for the chosen stage.
  double contrast(double energy, double flux_a, double flux_b, Stage stage = Stage::Full) const;

 private:
  Device device_;
  PeierlsGauge gauge_;
  LeadBroadening broadening_;
  Matrix sigma_leads_;
};

}  // namespace abring
