#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aptsense/params.hpp"

namespace aptsense {

// Input-noise convention for the covariance propagation.
//  SymmetricVacuum: unit covariance for every input channel (symmetrised
//    vacuum in these quadrature units); all matrices stay real.
//  AsWritten: channel covariance I + i*Jsym carried verbatim, where Jsym
//    is the symplectic form; the result is complex and Hermitian.  Note
//    I + i*Jsym has rank 2, and because the response commutes with Jsym
//    the propagated covariance is singular for every parameter point, so
//    Fisher-information queries in this mode raise SingularCovariance.
enum class CovarianceMode { SymmetricVacuum, AsWritten };

struct ProbeConfig {
  // Input quadrature means (xa, xb, ya, yb).
  Eigen::Vector4d mu_in{2.0, 2.0, 0.0, 0.0};
  CovarianceMode covariance_mode = CovarianceMode::SymmetricVacuum;
  // Central-difference step for d(mu)/d(omega), in units of big_gamma.
  double derivative_step = 1e-6;

  // Throws std::invalid_argument unless mu_in is finite and
  // 0 < derivative_step <= 1e-2 (in units of big_gamma).
  void validate(const SystemParams& p) const;
};

// Output quadrature means (I - gamma_c * G(omega)) * mu_in.
Eigen::Vector4d output_mean(const SystemParams& p, double omega,
                            const ProbeConfig& probe);

// Propagated output covariance
//   B V_in B^T + gamma_c*gamma_i G V_i G^T + gamma_c*gamma_bath G V_b G^T
// with B = I - gamma_c G and gamma_i = |gamma0 - gamma_c|.  Real (zero
// imaginary part) in SymmetricVacuum mode.
Eigen::Matrix4cd output_covariance(const SystemParams& p, double omega,
                                   const ProbeConfig& probe);

// Gaussian Fisher information of the drive frequency carried by the mean,
//   (d mu/d omega)^T V_out^{-1} (d mu/d omega),
// evaluated through a QR factor of the stacked noise legs so the result
// stays accurate where V_out is nearly singular.  The central-difference
// step shrinks automatically near critical frequencies so the stencil
// never straddles a singularity.  Throws SingularAtFrequency on a
// singular response at the stencil points and SingularCovariance when
// V_out is not invertible.
double qfi(const SystemParams& p, double omega, const ProbeConfig& probe);

// Cramer-Rao bound 1/sqrt(qfi); +infinity when the information vanishes.
double qcrb(const SystemParams& p, double omega, const ProbeConfig& probe);

struct QcrbSweep {
  struct Row {
    double omega;
    double qfi;
    double qcrb;
    bool singular;  // response or covariance singular at this omega
  };
  std::vector<Row> rows;
  SystemParams params;
  ProbeConfig probe;
};

// Evaluates qfi/qcrb over a strictly increasing frequency grid.  Singular
// points are recorded with qfi = +infinity, qcrb = 0 and flagged rather
// than aborting the sweep.  Deterministic: serial evaluation, identical
// results for identical inputs.
QcrbSweep qcrb_sweep(const SystemParams& p, const std::vector<double>& omega_grid,
                     const ProbeConfig& probe);

}  // namespace aptsense
