#pragma once

#include "abring/lattice.hpp"
#include "abring/selfenergy.hpp"

namespace abring {

enum class Stage { Bare, Full };

// Retarded/advanced Green's functions and spectral function at one (E, flux)
// point. `residual` is max|(E - H - Sigma) G^R - 1|; when it exceeds
// kResidualTol the point is flagged and `rcond` holds the LU reciprocal
// condition estimate (otherwise rcond is NaN).
struct GreensFunctions {
  Matrix retarded;
  Matrix advanced;
  Matrix spectral;
  double energy = 0.0;
  double flux = 0.0;
  Stage stage = Stage::Bare;
  double residual = 0.0;
  double rcond = 0.0;
  bool flagged = false;

  int dim() const { return static_cast<int>(retarded.rows()); }
};

inline constexpr double kResidualTol = 1e-10;

// G~^R = [E - H - Sigma_leads]^-1
GreensFunctions bare_green(double energy, const HamiltonianMatrix& h, const Matrix& sigma_leads);

// G^R = [E - H - Sigma_leads - Sigma_AR]^-1. Sigma_AR must carry the same
// (E, flux) tags as the request or StalenessError is thrown.
GreensFunctions full_green(double energy, const HamiltonianMatrix& h, const Matrix& sigma_leads,
                           const AndreevSelfEnergy& sigma_ar);

// A = (G^A - G^R) / (2 pi i)
Matrix spectral_function(const GreensFunctions& greens);

// Diagonal of G^R at the given sites, in order.
std::vector<Complex> diagonal_at(const GreensFunctions& greens, std::span<const int> sites);

}  // namespace abring
