#pragma once

#include <Eigen/Dense>
#include <complex>

#include "aptsense/params.hpp"

namespace aptsense {

// Eigenvalue coalescence tolerance, relative to Gamma^2 (the natural scale
// of the discriminant delta^2/4 - Gamma^2).
inline constexpr double kDefaultEpTol = 1e-9;

enum class Phase { Unbroken, Broken, ExceptionalPoint };

const char* to_string(Phase phase);

struct Spectrum {
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
  Eigen::Vector2cd psi_plus;
  Eigen::Vector2cd psi_minus;
  Phase phase;
};

// Rotating-frame non-Hermitian Hamiltonian of the coupled pair:
//   [ delta/2 - i(gamma0+Gamma)   -i Gamma                   ]
//   [ -i Gamma                    -delta/2 - i(gamma0+Gamma) ]
// Anti-commutes with complex conjugation composed with mode exchange.
Eigen::Matrix2cd build_effective_hamiltonian(const SystemParams& p);

// Lab-frame version: the rotating-frame matrix shifted by the mean mode
// frequency on the diagonal.
Eigen::Matrix2cd build_full_hamiltonian(const FullFrameParams& p);

// Closed-form eigendecomposition of an arbitrary complex 2x2 matrix.
// At a coalescence point (discriminant below ep_tol relative to its own
// scale) both eigenvalue slots carry the degenerate value and both
// eigenvector slots carry the single eigenvector.  A near-scalar matrix
// (all of b, c, a-d negligible) is degenerate but not defective and
// returns the canonical basis vectors instead.
// Eigenvectors are normalised so the second component is 1 whenever it is
// not negligible.  Throws NonFiniteMatrix on non-finite input.
Spectrum eigensystem(const Eigen::Matrix2cd& h, double ep_tol = kDefaultEpTol);

// Phase of the rotating-frame spectrum as a function of detuning:
// |delta| < 2*Gamma unbroken (real part splits), |delta| > 2*Gamma broken
// (imaginary part splits), |delta| = 2*Gamma within tolerance the
// exceptional point.
Phase classify_phase(const SystemParams& p, double ep_tol = kDefaultEpTol);

// Max-norm residual of the antisymmetry sx * conj(h) * sx + h, where sx is
// the mode-exchange matrix.  Zero (to rounding) for every rotating-frame
// matrix produced by build_effective_hamiltonian.
double check_anti_pt(const Eigen::Matrix2cd& h);

}  // namespace aptsense
