#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "aptsense/params.hpp"

namespace aptsense {

// Determinant magnitude below which the quadrature response is treated as
// singular (absolute, in the caller's rate units to the 4th power).
inline constexpr double kSingularityFloor = 1e-250;

// A real critical root omega^2 may undershoot zero by rounding; accept
// down to -kRootTol * Gamma^2.  The same scale bounds the acceptable
// imaginary part.
inline constexpr double kRootTol = 1e-10;

// Tolerance on the zero-frequency lasing-locus residual
// 4*gamma0^2 + delta^2 + 8*gamma0*Gamma, relative to Gamma^2.
inline constexpr double kLocusTol = 1e-8;

// Frequency-domain quadrature response at a single drive frequency, in the
// basis (xa, xb, ya, yb).
struct TransferMatrix4 {
  Eigen::Matrix4d matrix;
  double omega = 0.0;
};

// Which singular-response configuration a parameter point belongs to.
enum class CriticalCase {
  BrokenDetuned,      // balanced gain gamma0 = -Gamma, |delta| > 2*Gamma
  UnbrokenLocus,      // zero-frequency lasing locus, |delta| < 2*Gamma
  ExceptionalPoint,   // gamma0 = -Gamma and |delta| = 2*Gamma
  NoRealRoot,         // response bounded at all real frequencies
};

const char* to_string(CriticalCase c);

struct CriticalFrequencies {
  std::complex<double> omega_sq_plus;   // the two roots of det = 0 in omega^2
  std::complex<double> omega_sq_minus;
  std::vector<double> real_roots;       // certified real frequencies, ascending
  CriticalCase case_label = CriticalCase::NoRealRoot;
};

// Inverse response matrix [[A, B], [-B, A]] with A = (gamma0+Gamma)*I +
// Gamma*sx and B = diag(omega - delta/2, omega + delta/2).  Always finite.
TransferMatrix4 inverse_transfer_matrix(const SystemParams& p, double omega);

// Pivoted-LU inverse of the above.  Throws SingularAtFrequency when the
// determinant magnitude falls below kSingularityFloor.
TransferMatrix4 transfer_matrix(const SystemParams& p, double omega);

// det of the inverse response via pivoted elimination.  Equals
// ((gamma0+Gamma)^2 - omega^2 + delta^2/4 - Gamma^2)^2
//   + 4*(gamma0+Gamma)^2*omega^2 identically.
double transfer_determinant(const SystemParams& p, double omega);

// Frequency derivative of the inverse response: the constant symplectic
// form [[0, I], [-I, 0]], independent of parameters.
Eigen::Matrix4d inverse_transfer_derivative();

// Roots of the determinant as a quadratic in omega^2, with the real
// frequencies certified against kRootTol and the parameter point
// classified into a CriticalCase.
CriticalFrequencies critical_frequencies(const SystemParams& p);

// Detuning delta >= 0 that puts (gamma0, Gamma) on the zero-frequency
// lasing locus 4*gamma0^2 + delta^2 + 8*gamma0*Gamma = 0, when one exists
// (-2*Gamma < gamma0 < 0).  Requires big_gamma > 0.
std::optional<double> unbroken_lasing_locus(double gamma0, double big_gamma);

}  // namespace aptsense
