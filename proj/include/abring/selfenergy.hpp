#pragma once

#include "abring/lattice.hpp"

#include <span>
#include <vector>

namespace abring {

// Wide-band lead couplings. Gamma^L is diagonal, gamma_L on the lead's sites
// and zero elsewhere, so only the diagonals are stored.
struct LeadBroadening {
  double gamma_i = 0.0;
  double gamma_ii = 0.0;
  Eigen::VectorXd diag_i;
  Eigen::VectorXd diag_ii;

  int dim() const { return static_cast<int>(diag_i.size()); }
  Eigen::MatrixXd matrix_i() const { return diag_i.asDiagonal(); }
  Eigen::MatrixXd matrix_ii() const { return diag_ii.asDiagonal(); }
  int rank_i() const { return static_cast<int>((diag_i.array() != 0.0).count()); }
  int rank_ii() const { return static_cast<int>((diag_ii.array() != 0.0).count()); }
};

struct AndreevCoupling {
  double t_ar = 0.0;
  double delta_abs = 1.0;
  double g = 1.0;

  // (t_ar |Delta| / g)^2
  double coefficient() const;
  void validate() const;
};

// Diagonal Andreev self-energy, tagged with the (E, flux) it was built at so
// the full solve can refuse a stale one.
struct AndreevSelfEnergy {
  Eigen::VectorXcd diagonal;
  double energy = 0.0;
  double flux = 0.0;

  Matrix matrix() const { return diagonal.asDiagonal(); }
};

struct SelfEnergySet {
  Matrix sigma_leads;
  AndreevSelfEnergy sigma_ar;

  double energy() const { return sigma_ar.energy; }
  double flux() const { return sigma_ar.flux; }
  Matrix total() const { return sigma_leads + sigma_ar.matrix(); }
};

LeadBroadening build_lead_broadening(const Geometry& geometry, double gamma_i, double gamma_ii);

// Geometry-free form: used for toy devices (e.g. a single site carrying both
// leads) that do not satisfy the ring layout invariants.
LeadBroadening build_lead_broadening(int dim, std::span<const int> lead_i, std::span<const int> lead_ii,
                                     double gamma_i, double gamma_ii);

// -i (Gamma^I + Gamma^II) / 2
Matrix lead_self_energy(const LeadBroadening& broadening);
Eigen::VectorXcd lead_self_energy_diagonal(const LeadBroadening& broadening);

// bare_diag[k] is the bare retarded Green's function element G~_ii at
// i = geometry.sc_sites[k].
AndreevSelfEnergy andreev_self_energy(const AndreevCoupling& coupling, std::span<const Complex> bare_diag,
                                      const Geometry& geometry, double energy, double flux);

}  // namespace abring
