#include "aptsense/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aptsense/errors.hpp"
#include "aptsense/hamiltonian.hpp"

namespace aptsense {

namespace {

// Conjugation that implements delta -> -delta on the quadrature response:
// exchange the two modes in both quadrature pairs.
Eigen::Matrix4d mode_exchange() {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s(0, 1) = s(1, 0) = 1.0;
  s(2, 3) = s(3, 2) = 1.0;
  return s;
}

double max_abs(const Eigen::Matrix4d& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

LaurentExpansion analytic_laurent(const SystemParams& p) {
  p.validate();
  if (!(p.big_gamma > 0.0)) {
    throw NotOnCriticalLocus("analytic_laurent: requires big_gamma > 0");
  }
  const double bg = p.big_gamma;
  const double bg2 = bg * bg;
  const double dabs = std::abs(p.delta);
  const double g = p.gamma0 + bg;

  const bool gain_balanced = std::abs(g) <= kDefaultEpTol * bg;
  const bool at_ep = std::abs(0.25 * dabs * dabs - bg2) <= kDefaultEpTol * bg2;
  const double locus_residual =
      4.0 * p.gamma0 * p.gamma0 + p.delta * p.delta + 8.0 * p.gamma0 * bg;

  LaurentExpansion out;
  Eigen::Matrix4d coeff;

  if (gain_balanced && at_ep) {
    // Double pole at zero frequency.
    out.case_label = CriticalCase::ExceptionalPoint;
    out.omega0 = 0.0;
    out.order_m = 2;
    coeff <<  0.0,  1.0, -1.0,  0.0,
              1.0,  0.0,  0.0,  1.0,
              1.0,  0.0,  0.0,  1.0,
              0.0, -1.0,  1.0,  0.0;
    coeff *= bg;
  } else if (gain_balanced && dabs > 2.0 * bg) {
    // Simple poles at +/- sqrt(delta^2/4 - Gamma^2); expand about the
    // positive one.
    out.case_label = CriticalCase::BrokenDetuned;
    const double w0 = std::sqrt(0.25 * dabs * dabs - bg2);
    out.omega0 = w0;
    out.order_m = 1;
    const double dp = w0 + 0.5 * dabs;
    const double dm = w0 - 0.5 * dabs;
    coeff <<  0.0,   bg, -dp,  0.0,
               bg,  0.0,  0.0, -dm,
               dp,  0.0,  0.0,   bg,
              0.0,   dm,   bg,  0.0;
    coeff /= 2.0 * w0;
  } else if (std::abs(locus_residual) <= kLocusTol * bg2) {
    if (std::abs(g) <= 1e-6 * bg) {
      throw NotOnCriticalLocus(
          "analytic_laurent: locus endpoint at balanced gain is degenerate");
    }
    // Simple pole at zero frequency on the lasing locus.
    out.case_label = CriticalCase::UnbrokenLocus;
    out.omega0 = 0.0;
    out.order_m = 1;
    const double h =
        std::sqrt(std::max(0.0, -p.gamma0 * (p.gamma0 + 2.0 * bg))) / g;
    const double f = bg / g;
    coeff <<    h,  0.0, -1.0,    f,
              0.0,   -h,    f, -1.0,
              1.0,   -f,    h,  0.0,
               -f,  1.0,  0.0,   -h;
    coeff /= 2.0;
  } else {
    throw NotOnCriticalLocus(
        "analytic_laurent: parameter point is not on a supported critical locus");
  }

  if (p.delta < 0.0) {
    const Eigen::Matrix4d s = mode_exchange();
    coeff = s * coeff * s;
  }
  out.coefficient = coeff;
  return out;
}

ResidueReport numerical_residue(const SystemParams& p, double omega0, int m,
                                std::vector<double> radii) {
  p.validate();
  if (!std::isfinite(omega0)) {
    throw std::invalid_argument("numerical_residue: omega0 must be finite");
  }
  if (m < 1) {
    throw std::invalid_argument("numerical_residue: pole order must be >= 1");
  }
  if (radii.empty()) {
    throw std::invalid_argument("numerical_residue: need at least one radius");
  }
  const double rmin = 1e-6 * (p.big_gamma > 0.0 ? p.big_gamma : 1.0);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!std::isfinite(radii[i]) || radii[i] < rmin) {
      throw std::invalid_argument(
          "numerical_residue: radii must be finite and >= 1e-6 coupling units");
    }
    if (i > 0 && !(radii[i] < radii[i - 1])) {
      throw std::invalid_argument(
          "numerical_residue: radii must be strictly decreasing");
    }
  }

  const std::size_t n = radii.size();
  std::vector<Eigen::Matrix4d> above(n), below(n), centered(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = radii[i];
    const double wp = std::pow(r, m);
    const double wm = std::pow(-r, m);
    above[i] = wp * transfer_matrix(p, omega0 + r).matrix;
    below[i] = wm * transfer_matrix(p, omega0 - r).matrix;
    // Averaging the two sides cancels the next (regular) expansion term.
    centered[i] = 0.5 * (above[i] + below[i]);
  }

  ResidueReport report;
  report.radii = radii;
  if (n == 1) {
    report.limit = centered[0];
  } else {
    // Linear-in-r extrapolation to r = 0 from the two smallest radii.
    const double r1 = radii[n - 2], r2 = radii[n - 1];
    report.limit =
        centered[n - 1] + (centered[n - 1] - centered[n - 2]) * (r2 / (r1 - r2));
  }

  // One-sided probes against the limit: a wrong pole order makes these
  // diverge as the radius shrinks instead of falling toward rounding.
  report.deviations.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    report.deviations[i] = std::max(max_abs(above[i] - report.limit),
                                    max_abs(below[i] - report.limit));
  }
  const double floor = 1e-7 * (1.0 + max_abs(report.limit));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (report.deviations[i + 1] >
        std::max(1.5 * report.deviations[i], floor)) {
      throw WrongPoleOrder(
          "numerical_residue: probes diverge as the radius shrinks; "
          "requested pole order " +
          std::to_string(m) + " is too low at omega0 = " +
          std::to_string(omega0));
    }
  }
  return report;
}

PoleFit pole_order_fit(const QcrbSweep& sweep, double omega0,
                       std::pair<double, double> window) {
  if (!std::isfinite(omega0)) {
    throw std::invalid_argument("pole_order_fit: omega0 must be finite");
  }
  if (!(window.first >= 0.0) || !(window.second > window.first)) {
    throw std::invalid_argument("pole_order_fit: bad fit window");
  }
  const double scale =
      sweep.params.big_gamma > 0.0 ? sweep.params.big_gamma : 1.0;
  const double step = sweep.probe.derivative_step * scale;
  const double lo = std::max(window.first, 10.0 * step);
  const double hi = window.second;

  std::vector<double> lx, ly;
  for (const QcrbSweep::Row& row : sweep.rows) {
    if (row.singular) continue;
    if (!std::isfinite(row.qfi) || !(row.qfi > 0.0)) continue;
    if (!std::isfinite(row.qcrb) || !(row.qcrb > 0.0)) continue;
    const double x = std::abs(row.omega - omega0);
    if (x < lo || x > hi) continue;
    lx.push_back(std::log10(x));
    ly.push_back(std::log10(row.qcrb));
  }
  const int n = static_cast<int>(lx.size());
  if (n < 8) {
    throw InsufficientData("pole_order_fit: only " + std::to_string(n) +
                           " usable rows in the fit window (need 8)");
  }

  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = lx[i] - mx, dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) {
    throw InsufficientData("pole_order_fit: degenerate abscissa in window");
  }

  PoleFit fit;
  fit.m_estimate = sxy / sxx;
  fit.intercept = my - fit.m_estimate * mx;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double resid = ly[i] - (fit.intercept + fit.m_estimate * lx[i]);
    ss_res += resid * resid;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.window = {lo, hi};
  fit.n_rows = n;
  return fit;
}

}  // namespace aptsense
