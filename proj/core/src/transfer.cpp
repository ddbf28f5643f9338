#include "aptsense/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "aptsense/errors.hpp"
#include "aptsense/hamiltonian.hpp"

namespace aptsense {

const char* to_string(CriticalCase c) {
  switch (c) {
    case CriticalCase::BrokenDetuned: return "BrokenDetuned";
    case CriticalCase::UnbrokenLocus: return "UnbrokenLocus";
    case CriticalCase::ExceptionalPoint: return "ExceptionalPoint";
    case CriticalCase::NoRealRoot: return "NoRealRoot";
  }
  return "?";
}

TransferMatrix4 inverse_transfer_matrix(const SystemParams& p, double omega) {
  p.validate();
  if (!std::isfinite(omega)) {
    throw std::invalid_argument("inverse_transfer_matrix: omega must be finite");
  }
  const double g = p.gamma0 + p.big_gamma;
  const double b1 = omega - 0.5 * p.delta;
  const double b2 = omega + 0.5 * p.delta;
  TransferMatrix4 out;
  out.omega = omega;
  Eigen::Matrix4d& m = out.matrix;
  m.setZero();
  // Damping block (gamma0+Gamma)*I + Gamma*sx on each quadrature pair.
  m(0, 0) = g;
  m(0, 1) = p.big_gamma;
  m(1, 0) = p.big_gamma;
  m(1, 1) = g;
  m(2, 2) = g;
  m(2, 3) = p.big_gamma;
  m(3, 2) = p.big_gamma;
  m(3, 3) = g;
  // Detuned-frequency block, antisymmetric between the two pairs.
  m(0, 2) = b1;
  m(1, 3) = b2;
  m(2, 0) = -b1;
  m(3, 1) = -b2;
  return out;
}

Eigen::Matrix4d inverse_transfer_derivative() {
  Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
  j(0, 2) = 1.0;
  j(1, 3) = 1.0;
  j(2, 0) = -1.0;
  j(3, 1) = -1.0;
  return j;
}

double transfer_determinant(const SystemParams& p, double omega) {
  const TransferMatrix4 ginv = inverse_transfer_matrix(p, omega);
  return ginv.matrix.partialPivLu().determinant();
}

TransferMatrix4 transfer_matrix(const SystemParams& p, double omega) {
  const TransferMatrix4 ginv = inverse_transfer_matrix(p, omega);
  const Eigen::PartialPivLU<Eigen::Matrix4d> lu(ginv.matrix);
  const double det = lu.determinant();
  if (std::abs(det) < kSingularityFloor) {
    throw SingularAtFrequency(
        omega, "transfer_matrix: response singular at omega = " +
                   std::to_string(omega));
  }
  return {lu.inverse(), omega};
}

CriticalFrequencies critical_frequencies(const SystemParams& p) {
  p.validate();
  const double bg = p.big_gamma;
  const double g = p.gamma0 + bg;
  const double bg2 = bg * bg;
  // det = 0 as a quadratic in omega^2: omega^2 = a +/- sqrt(radicand).
  const double a =
      -(p.gamma0 * p.gamma0 + 2.0 * p.gamma0 * bg + 2.0 * bg2) +
      0.25 * p.delta * p.delta;
  const std::complex<double> radicand(
      g * g * (4.0 * bg2 - p.delta * p.delta), 0.0);
  const std::complex<double> s = std::sqrt(radicand);

  CriticalFrequencies out;
  out.omega_sq_plus = a + s;
  out.omega_sq_minus = a - s;

  const double tol = kRootTol * bg2;
  auto add_real_roots = [&](const std::complex<double>& w2) {
    if (std::abs(w2.imag()) > tol) return;
    double x = w2.real();
    if (x < -tol) return;
    // Collapse the tolerance band around zero onto the single root 0, so a
    // roundoff residue of either sign cannot split it into a spurious pair.
    if (x <= tol) x = 0.0;
    const double r = std::sqrt(x);
    out.real_roots.push_back(r);
    if (r > 0.0) out.real_roots.push_back(-r);
  };
  add_real_roots(out.omega_sq_plus);
  if (out.omega_sq_minus != out.omega_sq_plus) {
    add_real_roots(out.omega_sq_minus);
  }
  std::sort(out.real_roots.begin(), out.real_roots.end());
  out.real_roots.erase(
      std::unique(out.real_roots.begin(), out.real_roots.end()),
      out.real_roots.end());

  // Classification; the exceptional point satisfies the locus residual as
  // well, so it is tested first.
  const double dabs = std::abs(p.delta);
  const bool gain_balanced = std::abs(g) <= kDefaultEpTol * bg;
  const bool at_ep =
      std::abs(0.25 * dabs * dabs - bg2) <= kDefaultEpTol * bg2 && bg > 0.0;
  const double locus_residual =
      4.0 * p.gamma0 * p.gamma0 + p.delta * p.delta + 8.0 * p.gamma0 * bg;
  if (gain_balanced && at_ep) {
    out.case_label = CriticalCase::ExceptionalPoint;
  } else if (gain_balanced && dabs > 2.0 * bg) {
    out.case_label = CriticalCase::BrokenDetuned;
  } else if (std::abs(locus_residual) <= kLocusTol * bg2 && bg > 0.0) {
    out.case_label = CriticalCase::UnbrokenLocus;
  } else {
    out.case_label = CriticalCase::NoRealRoot;
  }
  return out;
}

std::optional<double> unbroken_lasing_locus(double gamma0, double big_gamma) {
  if (!std::isfinite(gamma0) || !std::isfinite(big_gamma)) {
    throw std::invalid_argument("unbroken_lasing_locus: arguments must be finite");
  }
  if (!(big_gamma > 0.0)) {
    throw std::invalid_argument("unbroken_lasing_locus: big_gamma must be > 0");
  }
  if (gamma0 <= -2.0 * big_gamma || gamma0 >= 0.0) {
    return std::nullopt;
  }
  return std::sqrt(-4.0 * gamma0 * (gamma0 + 2.0 * big_gamma));
}

}  // namespace aptsense
