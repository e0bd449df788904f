#pragma once

#include <Eigen/Dense>

#include <vector>

namespace abring {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

// Static layout of the device: a flux-threaded ring of n_ring sites, two
// wide-band leads attached to ring sites, an optional mx-by-my normal-metal
// spacer, and the set of sites that couple to the superconductor.
//
// Ring sites are numbered 0..n_ring-1. Spacer site (column n, row m) is
// n_ring + n*my + m. When mx == 0 the spacer is absent and `my` is only a
// label (the number of superconducting contact sites in the figure presets).
struct Geometry {
  int n_ring = 100;
  std::vector<int> lead_i_sites;
  std::vector<int> lead_ii_sites;
  std::vector<int> sc_sites;
  int mx = 0;
  int my = 10;
  std::vector<int> ring_contact_sites;

  int total_sites() const { return n_ring + mx * my; }
  bool has_spacer() const { return mx > 0; }

  // Throws GeometryError on any violated invariant.
  void validate() const;

  // Preset ring: N = 100, lead I = {50..69}, lead II = {0..19},
  // superconductor on {20..29}.
  static Geometry ring_preset();

  // Preset ring with an mx-by-my spacer. The spacer's column 0 couples to
  // ring sites {contact_start, .., contact_start + my - 1}; the superconductor
  // attaches to every site of the last column.
  static Geometry spacer_preset(int mx, int my, int contact_start = 20);
};

struct TightBindingParams {
  double eps_ring = 0.0;
  double t_ring = -1.0;
  double eps_spacer = 0.0;
  double t_x = -1.0;
  double t_y = -1.0;
  double t_x_prime = -1.0;
  double flux = 3.14159265358979323846;

  void validate() const;
};

// How the Peierls phase is spread around the ring. Distributed puts
// e^{i flux/N} on every ring bond; Concentrated puts e^{i flux} on the bond
// (N-1, 0). With a spacer, the ring-spacer hoppings in the Distributed gauge
// carry the compensating phase e^{-i r flux/N} so both gauges describe the
// same device: flux threads the ring's hole and nothing else.
enum class PeierlsGauge { Distributed, Concentrated };

struct HamiltonianMatrix {
  Matrix entries;
  double flux = 0.0;

  int dim() const { return static_cast<int>(entries.rows()); }
};

// Spacer site index for column `col`, row `row`.
int site_index(int col, int row, const Geometry& geometry);

// All spacer site indices in the last column (the superconducting interface).
std::vector<int> last_column_sites(const Geometry& geometry);

HamiltonianMatrix build_ring_hamiltonian(const TightBindingParams& params, const Geometry& geometry,
                                         PeierlsGauge gauge = PeierlsGauge::Distributed);

// Mx*My block in local spacer coordinates (row index = n*my + m).
HamiltonianMatrix build_spacer_hamiltonian(const TightBindingParams& params, const Geometry& geometry);

HamiltonianMatrix assemble_total_hamiltonian(const TightBindingParams& params, const Geometry& geometry,
                                             PeierlsGauge gauge = PeierlsGauge::Distributed);

// Max-norm of H - H^dagger.
double hermiticity_defect(const Matrix& h);

// Number of distinct nonzero off-diagonal pairs (i < j).
int count_bonds(const Matrix& h, double tol = 0.0);

}  // namespace abring
