#include "abring/greens.hpp"

#include "abring/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace abring {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kSingularRcond = 1e-15;

void check_inputs(double energy, const HamiltonianMatrix& h, const Matrix& sigma) {
  if (!std::isfinite(energy)) throw ArgumentError("energy must be finite");
  if (sigma.rows() != h.dim() || sigma.cols() != h.dim()) {
    throw ArgumentError("self-energy is " + std::to_string(sigma.rows()) + "x" + std::to_string(sigma.cols()) +
                        " but the Hamiltonian is " + std::to_string(h.dim()) + "x" + std::to_string(h.dim()));
  }
  if (hermiticity_defect(h.entries) > kHermitianTol) throw ArgumentError("Hamiltonian is not Hermitian");
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    if (sigma(i, i).imag() > kHermitianTol) {
      throw CausalityError("self-energy diagonal at site " + std::to_string(i) + " has positive imaginary part");
    }
  }
}

GreensFunctions solve(double energy, const HamiltonianMatrix& h, const Matrix& sigma, Stage stage) {
  Matrix a = -h.entries - sigma;
  a.diagonal().array() += energy;

  Eigen::PartialPivLU<Matrix> lu(a);

  GreensFunctions g;
  g.energy = energy;
  g.flux = h.flux;
  g.stage = stage;
  g.retarded = lu.inverse();
  g.rcond = std::numeric_limits<double>::quiet_NaN();

  if (!g.retarded.allFinite()) {
    g.rcond = lu.rcond();
    std::ostringstream msg;
    msg << "singular system at E = " << energy << ", flux = " << h.flux << " (rcond estimate " << g.rcond
        << "); is every lead coupling zero?";
    throw SolverError(msg.str(), g.rcond);
  }

  Matrix check = a * g.retarded;
  check.diagonal().array() -= 1.0;
  g.residual = check.cwiseAbs().maxCoeff();
  if (g.residual > kResidualTol) {
    g.rcond = lu.rcond();
    if (g.rcond < kSingularRcond) {
      std::ostringstream msg;
      msg << "ill-conditioned system at E = " << energy << ", flux = " << h.flux << " (rcond estimate " << g.rcond
          << ", residual " << g.residual << ")";
      throw SolverError(msg.str(), g.rcond);
    }
    g.flagged = true;
  }

  g.advanced = g.retarded.adjoint();
  g.spectral = spectral_function(g);
  return g;
}

}  // namespace

GreensFunctions bare_green(double energy, const HamiltonianMatrix& h, const Matrix& sigma_leads) {
  check_inputs(energy, h, sigma_leads);
  return solve(energy, h, sigma_leads, Stage::Bare);
}

GreensFunctions full_green(double energy, const HamiltonianMatrix& h, const Matrix& sigma_leads,
                           const AndreevSelfEnergy& sigma_ar) {
  if (sigma_ar.energy != energy || sigma_ar.flux != h.flux) {
    std::ostringstream msg;
    msg << "Andreev self-energy built at (E = " << sigma_ar.energy << ", flux = " << sigma_ar.flux
        << ") used for a solve at (E = " << energy << ", flux = " << h.flux << ")";
    throw StalenessError(msg.str());
  }
  if (sigma_ar.diagonal.size() != h.dim()) throw ArgumentError("Andreev self-energy has the wrong dimension");
  Matrix sigma = sigma_leads;
  sigma.diagonal() += sigma_ar.diagonal;
  check_inputs(energy, h, sigma);
  return solve(energy, h, sigma, Stage::Full);
}

Matrix spectral_function(const GreensFunctions& greens) {
  const Complex two_pi_i(0.0, 2.0 * std::numbers::pi);
  return (greens.advanced - greens.retarded) / two_pi_i;
}

std::vector<Complex> diagonal_at(const GreensFunctions& greens, std::span<const int> sites) {
  std::vector<Complex> out;
  out.reserve(sites.size());
  for (int s : sites) {
    if (s < 0 || s >= greens.dim()) throw IndexError("site " + std::to_string(s) + " outside device");
    out.push_back(greens.retarded(s, s));
  }
  return out;
}

}  // namespace abring
