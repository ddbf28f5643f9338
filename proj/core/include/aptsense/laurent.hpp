#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "aptsense/metrology.hpp"
#include "aptsense/params.hpp"
#include "aptsense/transfer.hpp"

namespace aptsense {

// Leading term of the response expansion around a singular frequency:
//   G(omega) ~ coefficient / (omega - omega0)^order_m.
struct LaurentExpansion {
  double omega0 = 0.0;
  int order_m = 1;
  Eigen::Matrix4d coefficient;
  CriticalCase case_label = CriticalCase::NoRealRoot;
};

// Numerical residue probes of the leading coefficient.
struct ResidueReport {
  Eigen::Matrix4d limit;           // extrapolated r -> 0 coefficient
  std::vector<double> radii;       // probe radii, decreasing
  std::vector<double> deviations;  // max one-sided deviation from limit
};

// Log-log slope fit of qcrb against distance from a singular frequency.
struct PoleFit {
  double m_estimate = 0.0;  // fitted d log10(qcrb) / d log10|omega-omega0|
  double intercept = 0.0;   // fitted log10(qcrb) at |omega-omega0| = 1
  double r_squared = 0.0;
  std::pair<double, double> window{0.0, 0.0};  // |omega-omega0| range used
  int n_rows = 0;                              // samples in the fit
};

// Closed-form leading Laurent coefficient at the critical frequency of a
// parameter point on one of the supported loci:
//   BrokenDetuned:    order 1 at omega0 = sqrt(delta^2/4 - Gamma^2),
//   UnbrokenLocus:    order 1 at omega0 = 0,
//   ExceptionalPoint: order 2 at omega0 = 0.
// Negative delta maps through conjugation by the quadrature mode-exchange
// matrix.  Throws NotOnCriticalLocus for any other parameter point.
LaurentExpansion analytic_laurent(const SystemParams& p);

// Probes (omega0 +/- r)^m * G(omega0 +/- r) at the given radii (positive,
// decreasing, min >= 1e-6 * Gamma), averages the two sides, and
// extrapolates linearly in r from the two smallest radii.  deviations[i]
// is the worse of the two one-sided probes at radii[i] against the limit;
// if the deviations fail to shrink toward a rounding floor the requested
// order is wrong and WrongPoleOrder is thrown.
ResidueReport numerical_residue(const SystemParams& p, double omega0, int m,
                                std::vector<double> radii);

// Ordinary least squares of log10(qcrb) on log10|omega - omega0| over the
// window (bounds on |omega - omega0|).  Rows flagged singular, with
// non-finite or non-positive values, or closer to omega0 than 10x the
// derivative step are excluded.  Throws InsufficientData below 8 usable
// rows.
PoleFit pole_order_fit(const QcrbSweep& sweep, double omega0,
                       std::pair<double, double> window);

}  // namespace aptsense
