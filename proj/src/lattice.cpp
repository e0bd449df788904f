#include "abring/lattice.hpp"

#include "abring/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace abring {

namespace {

void check_unique_in_range(const std::vector<int>& sites, int lo, int hi, const char* name) {
  std::set<int> seen;
  for (int s : sites) {
    if (s < lo || s >= hi) {
      throw GeometryError(std::string(name) + ": site " + std::to_string(s) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
    if (!seen.insert(s).second) {
      throw GeometryError(std::string(name) + ": duplicate site " + std::to_string(s));
    }
  }
}

void check_disjoint(const std::vector<int>& a, const std::vector<int>& b, const char* name_a,
                    const char* name_b) {
  for (int s : a) {
    if (std::find(b.begin(), b.end(), s) != b.end()) {
      throw GeometryError(std::string(name_a) + " and " + name_b + " share site " + std::to_string(s));
    }
  }
}

std::vector<int> iota_sites(int first, int count) {
  std::vector<int> v(static_cast<std::size_t>(count));
  std::iota(v.begin(), v.end(), first);
  return v;
}

}  // namespace

void Geometry::validate() const {
  if (n_ring < 3) {
    throw GeometryError("ring needs at least 3 sites, got n_ring = " + std::to_string(n_ring));
  }
  if (mx < 0 || my < 0) throw GeometryError("spacer dimensions must be non-negative");
  if (mx > 0 && my < 1) throw GeometryError("spacer with mx > 0 needs my >= 1");

  check_unique_in_range(lead_i_sites, 0, n_ring, "lead_i_sites");
  check_unique_in_range(lead_ii_sites, 0, n_ring, "lead_ii_sites");
  check_disjoint(lead_i_sites, lead_ii_sites, "lead_i_sites", "lead_ii_sites");

  if (mx == 0) {
    check_unique_in_range(sc_sites, 0, n_ring, "sc_sites");
    check_disjoint(lead_i_sites, sc_sites, "lead_i_sites", "sc_sites");
    check_disjoint(lead_ii_sites, sc_sites, "lead_ii_sites", "sc_sites");
  } else {
    check_unique_in_range(sc_sites, n_ring, total_sites(), "sc_sites");
    if (static_cast<int>(ring_contact_sites.size()) != my) {
      throw GeometryError("ring_contact_sites must hold exactly my = " + std::to_string(my) + " sites, got " +
                          std::to_string(ring_contact_sites.size()));
    }
    check_unique_in_range(ring_contact_sites, 0, n_ring, "ring_contact_sites");
  }
}

Geometry Geometry::ring_preset() {
  Geometry g;
  g.n_ring = 100;
  g.lead_i_sites = iota_sites(50, 20);
  g.lead_ii_sites = iota_sites(0, 20);
  g.sc_sites = iota_sites(20, 10);
  g.mx = 0;
  g.my = 10;
  return g;
}

Geometry Geometry::spacer_preset(int mx, int my, int contact_start) {
  Geometry g = ring_preset();
  g.mx = mx;
  g.my = my;
  if (mx > 0) {
    g.ring_contact_sites = iota_sites(contact_start, my);
    g.sc_sites = last_column_sites(g);
  }
  return g;
}

void TightBindingParams::validate() const {
  for (double v : {eps_ring, t_ring, eps_spacer, t_x, t_y, t_x_prime, flux}) {
    if (!std::isfinite(v)) throw ParameterError("tight-binding parameters must be finite");
  }
}

int site_index(int col, int row, const Geometry& geometry) {
  if (col < 0 || col >= geometry.mx || row < 0 || row >= geometry.my) {
    throw IndexError("spacer coordinate (" + std::to_string(col) + ", " + std::to_string(row) +
                     ") outside " + std::to_string(geometry.mx) + "x" + std::to_string(geometry.my));
  }
  return geometry.n_ring + col * geometry.my + row;
}

std::vector<int> last_column_sites(const Geometry& geometry) {
  std::vector<int> sites;
  for (int m = 0; m < geometry.my; ++m) sites.push_back(site_index(geometry.mx - 1, m, geometry));
  return sites;
}

HamiltonianMatrix build_ring_hamiltonian(const TightBindingParams& params, const Geometry& geometry,
                                         PeierlsGauge gauge) {
  const int n = geometry.n_ring;
  if (n < 3) throw GeometryError("ring needs at least 3 sites, got n_ring = " + std::to_string(n));

  HamiltonianMatrix h;
  h.flux = params.flux;
  h.entries = Matrix::Zero(n, n);

  const Complex per_bond = std::polar(1.0, params.flux / n);
  const Complex whole = std::polar(1.0, params.flux);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    Complex phase = per_bond;
    if (gauge == PeierlsGauge::Concentrated) phase = (i == n - 1) ? whole : Complex(1.0, 0.0);
    h.entries(i, i) = params.eps_ring;
    h.entries(i, j) += params.t_ring * phase;
    h.entries(j, i) += params.t_ring * std::conj(phase);
  }
  return h;
}

HamiltonianMatrix build_spacer_hamiltonian(const TightBindingParams& params, const Geometry& geometry) {
  const int mx = geometry.mx;
  const int my = geometry.my;
  if (mx == 0 && my > 0) throw GeometryError("spacer with mx = 0 cannot have my > 0 rows");
  if (mx < 1 || my < 1) throw GeometryError("spacer needs mx >= 1 and my >= 1");

  auto local = [my](int col, int row) { return col * my + row; };

  HamiltonianMatrix h;
  h.flux = params.flux;
  h.entries = Matrix::Zero(mx * my, mx * my);
  for (int col = 0; col < mx; ++col) {
    for (int row = 0; row < my; ++row) {
      const int s = local(col, row);
      h.entries(s, s) = params.eps_spacer;
      if (col + 1 < mx) {
        const int r = local(col + 1, row);
        h.entries(s, r) = params.t_x;
        h.entries(r, s) = params.t_x;
      }
      if (row + 1 < my) {
        const int r = local(col, row + 1);
        h.entries(s, r) = params.t_y;
        h.entries(r, s) = params.t_y;
      }
    }
  }
  return h;
}

HamiltonianMatrix assemble_total_hamiltonian(const TightBindingParams& params, const Geometry& geometry,
                                             PeierlsGauge gauge) {
  geometry.validate();
  HamiltonianMatrix ring = build_ring_hamiltonian(params, geometry, gauge);
  if (!geometry.has_spacer()) return ring;

  const int n = geometry.n_ring;
  const int total = geometry.total_sites();
  HamiltonianMatrix spacer = build_spacer_hamiltonian(params, geometry);

  HamiltonianMatrix h;
  h.flux = params.flux;
  h.entries = Matrix::Zero(total, total);
  h.entries.topLeftCorner(n, n) = ring.entries;
  h.entries.bottomRightCorner(total - n, total - n) = spacer.entries;
  // In the distributed gauge ring site r carries phase r*flux/N relative to
  // site 0; the contact hoppings undo it so that no ring-spacer plaquette
  // encloses flux. Only the ring's hole is threaded, in either gauge.
  for (int m = 0; m < geometry.my; ++m) {
    const int r = geometry.ring_contact_sites[static_cast<std::size_t>(m)];
    const int s = site_index(0, m, geometry);
    Complex hop = params.t_x_prime;
    if (gauge == PeierlsGauge::Distributed) hop *= std::polar(1.0, -params.flux * r / n);
    h.entries(r, s) = hop;
    h.entries(s, r) = std::conj(hop);
  }
  return h;
}

double hermiticity_defect(const Matrix& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

int count_bonds(const Matrix& h, double tol) {
  int bonds = 0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < h.cols(); ++j) {
      if (std::abs(h(i, j)) > tol || std::abs(h(j, i)) > tol) ++bonds;
    }
  }
  return bonds;
}

}  // namespace abring
