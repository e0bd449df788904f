#include "abring/observables.hpp"

#include "abring/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace abring {

namespace {

constexpr double kImagTol = 1e-10;
constexpr double kTinyTransmission = 1e-14;
constexpr double kNegativeTol = 1e-12;

std::vector<int> support(const Eigen::VectorXd& d) {
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) != 0.0) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

// (G^R Gamma G^A)_ii for every i.
Eigen::VectorXcd weighted_injection(const GreensFunctions& greens, const Eigen::VectorXd& gamma) {
  const std::vector<int> lead = support(gamma);
  Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(greens.dim());
  for (int i = 0; i < greens.dim(); ++i) {
    Complex acc(0.0, 0.0);
    for (int j : lead) acc += greens.retarded(i, j) * gamma(j) * greens.advanced(j, i);
    diag(i) = acc;
  }
  return diag;
}

}  // namespace

double transmission(const GreensFunctions& greens, const LeadBroadening& broadening) {
  if (broadening.dim() != greens.dim()) throw ArgumentError("broadening and Green's function dimensions differ");
  const std::vector<int> lead_i = support(broadening.diag_i);
  const std::vector<int> lead_ii = support(broadening.diag_ii);

  Complex trace(0.0, 0.0);
  for (int i : lead_i) {
    for (int j : lead_ii) {
      trace += broadening.diag_i(i) * greens.retarded(i, j) * broadening.diag_ii(j) * greens.advanced(j, i);
    }
  }
  if (std::abs(trace.imag()) > kImagTol) {
    std::ostringstream msg;
    msg << "transmission trace has imaginary part " << trace.imag() << " at E = " << greens.energy;
    throw ConsistencyError(msg.str());
  }
  if (trace.real() < -kNegativeTol) {
    std::ostringstream msg;
    msg << "negative transmission " << trace.real() << " at E = " << greens.energy;
    throw ConsistencyError(msg.str());
  }
  return trace.real();
}

double contrast_from_transmissions(double t_a, double t_b) {
  if (t_a < kTinyTransmission && t_b < kTinyTransmission) {
    throw UndefinedContrastError("contrast undefined: both transmissions below 1e-14");
  }
  return 2.0 * std::abs(t_a - t_b) / (t_a + t_b);
}

double ldos(const GreensFunctions& greens, int site) {
  if (site < 0 || site >= greens.dim()) throw IndexError("LDOS site " + std::to_string(site) + " outside device");
  return greens.spectral(site, site).real();
}

std::vector<double> ldos_vector(const GreensFunctions& greens) {
  std::vector<double> out(static_cast<std::size_t>(greens.dim()));
  for (int i = 0; i < greens.dim(); ++i) out[static_cast<std::size_t>(i)] = greens.spectral(i, i).real();
  return out;
}

DephasingRatio dephasing_rate(const GreensFunctions& greens, const LeadBroadening& broadening,
                              const AndreevSelfEnergy& sigma_ar) {
  if (greens.stage != Stage::Full) throw ArgumentError("dephasing rate needs the full Green's function");
  if (sigma_ar.energy != greens.energy || sigma_ar.flux != greens.flux) {
    throw StalenessError("Andreev self-energy and Green's function were built at different (E, flux)");
  }
  if (sigma_ar.diagonal.size() != greens.dim() || broadening.dim() != greens.dim()) {
    throw ArgumentError("dimension mismatch in dephasing rate inputs");
  }

  const Eigen::VectorXcd injected = weighted_injection(greens, broadening.diag_i);
  const Complex denominator = injected.sum();
  if (std::abs(denominator.imag()) > kImagTol) {
    std::ostringstream msg;
    msg << "injection trace has imaginary part " << denominator.imag();
    throw ConsistencyError(msg.str());
  }
  if (denominator.real() < kTinyTransmission) {
    throw InjectionStarvedError("injection trace Tr[G^R Gamma^I G^A] below 1e-14");
  }
  const Complex numerator = (sigma_ar.diagonal.array() * injected.array()).sum();

  DephasingRatio r;
  r.ratio = numerator / denominator.real();
  return r;
}

PointSolver::PointSolver(Device device, PeierlsGauge gauge) : device_(std::move(device)), gauge_(gauge) {
  device_.geometry.validate();
  device_.params.validate();
  device_.coupling.validate();
  broadening_ = build_lead_broadening(device_.geometry, device_.gamma_i, device_.gamma_ii);
  sigma_leads_ = lead_self_energy(broadening_);
}

HamiltonianMatrix PointSolver::hamiltonian(double flux) const {
  TightBindingParams p = device_.params;
  p.flux = flux;
  return assemble_total_hamiltonian(p, device_.geometry, gauge_);
}

PointResult PointSolver::evaluate(double energy, double flux) const {
  const HamiltonianMatrix h = hamiltonian(flux);
  const GreensFunctions bare = bare_green(energy, h, sigma_leads_);
  const std::vector<Complex> bare_diag = diagonal_at(bare, device_.geometry.sc_sites);
  const AndreevSelfEnergy sigma_ar =
      andreev_self_energy(device_.coupling, bare_diag, device_.geometry, energy, flux);
  const GreensFunctions full = full_green(energy, h, sigma_leads_, sigma_ar);

  PointResult r;
  r.energy = energy;
  r.flux = flux;
  r.transmission_bare = transmission(bare, broadening_);
  r.transmission_full = transmission(full, broadening_);
  r.ldos_full = ldos_vector(full);
  r.dephasing = dephasing_rate(full, broadening_, sigma_ar);
  r.max_residual = std::max(bare.residual, full.residual);
  r.flagged = bare.flagged || full.flagged;
  return r;
}

double PointSolver::contrast(double energy, double flux_a, double flux_b, Stage stage) const {
  const PointResult a = evaluate(energy, flux_a);
  const PointResult b = evaluate(energy, flux_b);
  if (stage == Stage::Bare) return contrast_from_transmissions(a.transmission_bare, b.transmission_bare);
  return contrast_from_transmissions(a.transmission_full, b.transmission_full);
}

}  // namespace abring
