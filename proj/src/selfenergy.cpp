#include "abring/selfenergy.hpp"

#include "abring/errors.hpp"

#include <cmath>
#include <string>

namespace abring {

namespace {

constexpr double kCausalityTol = 1e-12;

Eigen::VectorXd lead_diagonal(int dim, std::span<const int> sites, double gamma) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
  for (int s : sites) {
    if (s < 0 || s >= dim) throw GeometryError("lead site " + std::to_string(s) + " outside device");
    d(s) = gamma;
  }
  return d;
}

}  // namespace

double AndreevCoupling::coefficient() const {
  const double a = t_ar * delta_abs / g;
  return a * a;
}

void AndreevCoupling::validate() const {
  if (!std::isfinite(t_ar) || t_ar < 0.0) throw ParameterError("t_ar must be finite and >= 0");
  if (!std::isfinite(delta_abs) || delta_abs <= 0.0) throw ParameterError("delta_abs must be finite and > 0");
  if (!std::isfinite(g) || g <= 0.0) throw ParameterError("g must be finite and > 0");
}

LeadBroadening build_lead_broadening(int dim, std::span<const int> lead_i, std::span<const int> lead_ii,
                                     double gamma_i, double gamma_ii) {
  if (!(gamma_i > 0.0) || !(gamma_ii > 0.0) || !std::isfinite(gamma_i) || !std::isfinite(gamma_ii)) {
    throw ParameterError("lead couplings must be finite and > 0 (got gamma_i = " + std::to_string(gamma_i) +
                         ", gamma_ii = " + std::to_string(gamma_ii) + ")");
  }
  LeadBroadening b;
  b.gamma_i = gamma_i;
  b.gamma_ii = gamma_ii;
  b.diag_i = lead_diagonal(dim, lead_i, gamma_i);
  b.diag_ii = lead_diagonal(dim, lead_ii, gamma_ii);
  return b;
}

LeadBroadening build_lead_broadening(const Geometry& geometry, double gamma_i, double gamma_ii) {
  geometry.validate();
  return build_lead_broadening(geometry.total_sites(), geometry.lead_i_sites, geometry.lead_ii_sites, gamma_i,
                               gamma_ii);
}

Eigen::VectorXcd lead_self_energy_diagonal(const LeadBroadening& broadening) {
  Eigen::VectorXcd d(broadening.dim());
  for (int i = 0; i < broadening.dim(); ++i) {
    d(i) = Complex(0.0, -0.5 * (broadening.diag_i(i) + broadening.diag_ii(i)));
  }
  return d;
}

Matrix lead_self_energy(const LeadBroadening& broadening) {
  return lead_self_energy_diagonal(broadening).asDiagonal();
}

AndreevSelfEnergy andreev_self_energy(const AndreevCoupling& coupling, std::span<const Complex> bare_diag,
                                      const Geometry& geometry, double energy, double flux) {
  coupling.validate();
  if (bare_diag.size() != geometry.sc_sites.size()) {
    throw ArgumentError("expected " + std::to_string(geometry.sc_sites.size()) +
                        " bare diagonal entries for the superconducting sites, got " +
                        std::to_string(bare_diag.size()));
  }
  const double coeff = coupling.coefficient();

  AndreevSelfEnergy sigma;
  sigma.energy = energy;
  sigma.flux = flux;
  sigma.diagonal = Eigen::VectorXcd::Zero(geometry.total_sites());
  for (std::size_t k = 0; k < bare_diag.size(); ++k) {
    const Complex g = bare_diag[k];
    if (g.imag() > kCausalityTol) {
      throw CausalityError("bare Green's function at site " + std::to_string(geometry.sc_sites[k]) +
                           " has Im = " + std::to_string(g.imag()) + " > 0");
    }
    sigma.diagonal(geometry.sc_sites[k]) = coeff * g;
  }
  return sigma;
}

}  // namespace abring
