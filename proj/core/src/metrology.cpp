#include "aptsense/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "aptsense/errors.hpp"
#include "aptsense/transfer.hpp"

namespace aptsense {

namespace {

constexpr double kDiagRatioFloor = 1e-13;  // QR-diagonal singularity cutoff

// Central-difference step in the caller's rate units, shrunk near real
// critical roots so the stencil never reaches across a singularity.
double effective_step(const SystemParams& p, double omega,
                      const ProbeConfig& probe,
                      const std::vector<double>& roots) {
  const double scale = p.big_gamma > 0.0 ? p.big_gamma : 1.0;
  double step = probe.derivative_step * scale;
  for (double r : roots) {
    const double dist = std::abs(omega - r);
    if (dist > 0.0) step = std::min(step, dist / 8.0);
  }
  return step;
}

}  // namespace

void ProbeConfig::validate(const SystemParams& p) const {
  p.validate();
  if (!mu_in.allFinite()) {
    throw std::invalid_argument("ProbeConfig: mu_in must be finite");
  }
  if (!(derivative_step > 0.0) || !(derivative_step <= 1e-2)) {
    throw std::invalid_argument(
        "ProbeConfig: derivative_step must lie in (0, 1e-2] coupling units");
  }
}

Eigen::Vector4d output_mean(const SystemParams& p, double omega,
                            const ProbeConfig& probe) {
  probe.validate(p);
  const Eigen::Matrix4d g = transfer_matrix(p, omega).matrix;
  return (Eigen::Matrix4d::Identity() - p.gamma_c * g) * probe.mu_in;
}

Eigen::Matrix4cd output_covariance(const SystemParams& p, double omega,
                                   const ProbeConfig& probe) {
  probe.validate(p);
  const Eigen::Matrix4d g = transfer_matrix(p, omega).matrix;
  const Eigen::Matrix4d b = Eigen::Matrix4d::Identity() - p.gamma_c * g;
  const double w_intr = p.gamma_c * p.intrinsic_loss();
  const double w_bath = p.gamma_c * p.gamma_bath;

  if (probe.covariance_mode == CovarianceMode::SymmetricVacuum) {
    const Eigen::Matrix4d v =
        b * b.transpose() + (w_intr + w_bath) * g * g.transpose();
    return v.cast<std::complex<double>>();
  }
  // Channel covariance I + i*Jsym carried verbatim through each leg.
  const std::complex<double> im(0.0, 1.0);
  const Eigen::Matrix4cd v_in =
      Eigen::Matrix4cd::Identity() +
      im * inverse_transfer_derivative().cast<std::complex<double>>();
  const Eigen::Matrix4cd bc = b.cast<std::complex<double>>();
  const Eigen::Matrix4cd gc = g.cast<std::complex<double>>();
  return bc * v_in * bc.transpose() + w_intr * gc * v_in * gc.transpose() +
         w_bath * gc * v_in * gc.transpose();
}

double qfi(const SystemParams& p, double omega, const ProbeConfig& probe) {
  probe.validate(p);
  const CriticalFrequencies crit = critical_frequencies(p);
  const double step = effective_step(p, omega, probe, crit.real_roots);

  const Eigen::Vector4d mu_hi = output_mean(p, omega + step, probe);
  const Eigen::Vector4d mu_lo = output_mean(p, omega - step, probe);
  const Eigen::Vector4d dmu = (mu_hi - mu_lo) / (2.0 * step);

  const Eigen::Matrix4d g = transfer_matrix(p, omega).matrix;
  const Eigen::Matrix4d b = Eigen::Matrix4d::Identity() - p.gamma_c * g;
  const double w_noise = p.gamma_c * (p.intrinsic_loss() + p.gamma_bath);

  // The quadratic form dmu^T V^{-1} dmu is evaluated through a QR factor
  // of the stacked noise legs L (V = L L^T = R^T R), which keeps full
  // relative accuracy where V is almost rank-deficient -- forming and
  // inverting V directly loses the small eigenvalues long before the
  // response poles are reached.
  if (probe.covariance_mode == CovarianceMode::SymmetricVacuum) {
    Eigen::Matrix<double, 4, 8> legs;
    legs.leftCols<4>() = b;
    legs.rightCols<4>() = std::sqrt(w_noise) * g;
    const Eigen::HouseholderQR<Eigen::Matrix<double, 8, 4>> qr(
        legs.transpose());
    const Eigen::Matrix4d r =
        qr.matrixQR().topRows<4>().triangularView<Eigen::Upper>();
    const double dmax = r.diagonal().cwiseAbs().maxCoeff();
    const double dmin = r.diagonal().cwiseAbs().minCoeff();
    if (dmax == 0.0 || dmin <= kDiagRatioFloor * dmax) {
      throw SingularCovariance(
          omega, "qfi: output covariance not invertible at omega = " +
                     std::to_string(omega));
    }
    const Eigen::Vector4d y =
        r.transpose().triangularView<Eigen::Lower>().solve(dmu);
    return y.squaredNorm();
  }

  // Channel covariance I + i*Jsym = P P^H with the Hermitian square root
  // P = (I + i*Jsym)/sqrt(2), so the legs become complex.
  const std::complex<double> im(0.0, 1.0);
  const Eigen::Matrix4cd proot =
      (Eigen::Matrix4cd::Identity() +
       im * inverse_transfer_derivative().cast<std::complex<double>>()) /
      std::sqrt(2.0);
  Eigen::Matrix<std::complex<double>, 4, 8> legs;
  legs.leftCols<4>() = b.cast<std::complex<double>>() * proot;
  legs.rightCols<4>() =
      std::sqrt(w_noise) * g.cast<std::complex<double>>() * proot;
  const Eigen::HouseholderQR<Eigen::Matrix<std::complex<double>, 8, 4>> qr(
      legs.adjoint());
  const Eigen::Matrix4cd r =
      qr.matrixQR().topRows<4>().triangularView<Eigen::Upper>();
  const double dmax = r.diagonal().cwiseAbs().maxCoeff();
  const double dmin = r.diagonal().cwiseAbs().minCoeff();
  if (dmax == 0.0 || dmin <= kDiagRatioFloor * dmax) {
    throw SingularCovariance(
        omega, "qfi: output covariance not invertible at omega = " +
                   std::to_string(omega));
  }
  const Eigen::Vector4cd y =
      r.adjoint()
          .triangularView<Eigen::Lower>()
          .solve(dmu.cast<std::complex<double>>());
  return y.squaredNorm();
}

double qcrb(const SystemParams& p, double omega, const ProbeConfig& probe) {
  const double f = qfi(p, omega, probe);
  if (f > 0.0) return 1.0 / std::sqrt(f);
  return std::numeric_limits<double>::infinity();
}

QcrbSweep qcrb_sweep(const SystemParams& p,
                     const std::vector<double>& omega_grid,
                     const ProbeConfig& probe) {
  probe.validate(p);
  if (omega_grid.empty()) {
    throw std::invalid_argument("qcrb_sweep: empty frequency grid");
  }
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    if (!std::isfinite(omega_grid[i])) {
      throw std::invalid_argument("qcrb_sweep: grid must be finite");
    }
    if (i > 0 && !(omega_grid[i] > omega_grid[i - 1])) {
      throw std::invalid_argument("qcrb_sweep: grid must be strictly increasing");
    }
  }

  QcrbSweep sweep;
  sweep.params = p;
  sweep.probe = probe;
  sweep.rows.reserve(omega_grid.size());
  for (double w : omega_grid) {
    QcrbSweep::Row row{w, 0.0, 0.0, false};
    try {
      row.qfi = qfi(p, w, probe);
      row.qcrb = row.qfi > 0.0 ? 1.0 / std::sqrt(row.qfi)
                               : std::numeric_limits<double>::infinity();
    } catch (const SingularAtFrequency&) {
      row.qfi = std::numeric_limits<double>::infinity();
      row.qcrb = 0.0;
      row.singular = true;
    } catch (const SingularCovariance&) {
      row.qfi = std::numeric_limits<double>::infinity();
      row.qcrb = 0.0;
      row.singular = true;
    }
    sweep.rows.push_back(row);
  }
  return sweep;
}

}  // namespace aptsense
