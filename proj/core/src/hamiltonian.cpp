#include "aptsense/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "aptsense/errors.hpp"

namespace aptsense {

using std::complex;

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Unbroken: return "Unbroken";
    case Phase::Broken: return "Broken";
    case Phase::ExceptionalPoint: return "ExceptionalPoint";
  }
  return "?";
}

Eigen::Matrix2cd build_effective_hamiltonian(const SystemParams& p) {
  p.validate();
  const double ga = p.gamma0 + p.big_gamma;  // per-mode total rate
  Eigen::Matrix2cd h;
  h(0, 0) = complex<double>(0.5 * p.delta, -ga);
  h(0, 1) = complex<double>(0.0, -p.big_gamma);
  h(1, 0) = complex<double>(0.0, -p.big_gamma);
  h(1, 1) = complex<double>(-0.5 * p.delta, -ga);
  return h;
}

Eigen::Matrix2cd build_full_hamiltonian(const FullFrameParams& p) {
  p.validate();
  Eigen::Matrix2cd h = build_effective_hamiltonian(p.sys);
  const double shift = p.rotating_frame_frequency();
  h(0, 0) += shift;
  h(1, 1) += shift;
  return h;
}

Spectrum eigensystem(const Eigen::Matrix2cd& h, double ep_tol) {
  if (!h.allFinite()) {
    throw NonFiniteMatrix("eigensystem: matrix has non-finite entries");
  }
  if (!(ep_tol >= 0.0)) {
    throw std::invalid_argument("eigensystem: ep_tol must be >= 0");
  }

  const complex<double> a = h(0, 0), b = h(0, 1);
  const complex<double> c = h(1, 0), d = h(1, 1);
  const complex<double> mean = 0.5 * (a + d);
  const complex<double> half_diff = 0.5 * (a - d);
  complex<double> disc = half_diff * half_diff + b * c;
  // A real product can carry imag = -0.0, which would push sqrt onto the
  // conjugate branch and swap the two eigenvalues; pin the sign of zero.
  if (disc.imag() == 0.0) disc = complex<double>(disc.real(), 0.0);
  const double scale = std::max(std::norm(half_diff), std::abs(b * c));

  Spectrum s;
  const bool coalesced = std::abs(disc) <= ep_tol * scale;

  if (coalesced) {
    s.phase = Phase::ExceptionalPoint;
    s.lambda_plus = s.lambda_minus = mean;
    // Nilpotent part h - mean*I; if it vanishes the matrix is scalar
    // (degenerate but diagonalisable), otherwise a genuine coalescence
    // with a single eigenvector.
    const double nil_norm =
        std::max({std::abs(half_diff), std::abs(b), std::abs(c)});
    const double h_norm = h.cwiseAbs().maxCoeff();
    if (nil_norm <= 1e-12 * h_norm || h_norm == 0.0) {
      s.psi_plus = Eigen::Vector2cd(1.0, 0.0);
      s.psi_minus = Eigen::Vector2cd(0.0, 1.0);
      return s;
    }
    // Null vector of [[half_diff, b], [c, -half_diff]]: either row gives
    // one; take the better-conditioned candidate.
    Eigen::Vector2cd v1(b, -half_diff);
    Eigen::Vector2cd v2(half_diff, c);
    Eigen::Vector2cd v = (v1.norm() >= v2.norm()) ? v1 : v2;
    if (std::abs(v(1)) > 1e-12 * v.cwiseAbs().maxCoeff()) {
      v /= v(1);
    } else {
      v /= v(0);
    }
    s.psi_plus = s.psi_minus = v;
    return s;
  }

  const complex<double> root = std::sqrt(disc);
  s.lambda_plus = mean + root;
  s.lambda_minus = mean - root;
  s.phase = (root.real() * root.real() >= root.imag() * root.imag())
                ? Phase::Broken     // eigenvalues split along the real axis
                : Phase::Unbroken;  // split along the imaginary axis

  auto eigvec = [&](const complex<double>& lambda) {
    // (h - lambda) kills (b, lambda - a) and (lambda - d, c) identically.
    Eigen::Vector2cd v1(b, lambda - a);
    Eigen::Vector2cd v2(lambda - d, c);
    Eigen::Vector2cd v = (v1.norm() >= v2.norm()) ? v1 : v2;
    if (std::abs(v(1)) > 1e-12 * v.cwiseAbs().maxCoeff()) {
      v /= v(1);
    } else {
      v /= v(0);
    }
    return v;
  };
  s.psi_plus = eigvec(s.lambda_plus);
  s.psi_minus = eigvec(s.lambda_minus);
  return s;
}

Phase classify_phase(const SystemParams& p, double ep_tol) {
  p.validate();
  if (!(ep_tol >= 0.0)) {
    throw std::invalid_argument("classify_phase: ep_tol must be >= 0");
  }
  // Same coalescence rule as eigensystem applied to the model matrix,
  // whose discriminant is delta^2/4 - Gamma^2 exactly.
  const double g2 = p.big_gamma * p.big_gamma;
  const double q = 0.25 * p.delta * p.delta;
  const double disc = q - g2;
  const double scale = std::max(q, g2);
  if (std::abs(disc) <= ep_tol * scale) return Phase::ExceptionalPoint;
  return disc > 0.0 ? Phase::Broken : Phase::Unbroken;
}

double check_anti_pt(const Eigen::Matrix2cd& h) {
  if (!h.allFinite()) {
    throw NonFiniteMatrix("check_anti_pt: matrix has non-finite entries");
  }
  Eigen::Matrix2cd sx;
  sx << 0.0, 1.0, 1.0, 0.0;
  const Eigen::Matrix2cd residual = sx * h.conjugate() * sx + h;
  return residual.cwiseAbs().maxCoeff();
}

}  // namespace aptsense
