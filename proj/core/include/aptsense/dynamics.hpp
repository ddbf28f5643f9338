#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "aptsense/params.hpp"

namespace aptsense {

// Mean mode amplitudes sampled on a time grid.
struct AmplitudeTrajectory {
  std::vector<double> times;
  std::vector<std::complex<double>> a_mean;
  std::vector<std::complex<double>> b_mean;
  // |tr(rho) - 1| per sample; filled by master-equation runs only.
  std::vector<double> trace_drift;
};

// Truncated-Fock master-equation run.
struct FockLindbladConfig {
  int n_max = 5;  // highest Fock level kept per mode
  std::complex<double> alpha_a{0.0, 0.0};  // initial coherent amplitudes
  std::complex<double> alpha_b{0.0, 0.0};
  double dt = 1e-3;
  double t_final = 2.0;

  // Throws std::invalid_argument on a bad grid or cutoff, and
  // GainNotLindblad when the balanced rate is negative (gain has no loss
  // dissipator).  dt must satisfy dt <= 0.01 / max rate.
  void validate(const FullFrameParams& p) const;
};

struct CrossValidationReport {
  struct Leg {
    std::string name;
    bool ran = false;     // false when skipped (e.g. gain: no Lindblad leg)
    bool passed = false;  // meaningful only when ran
    double max_deviation = 0.0;
    std::string note;
  };
  std::vector<Leg> legs;

  bool all_passed() const;  // every leg that ran passed
};

// Mean-amplitude equations of motion integrated with fixed-step RK4 and
// step halving until successive refinements agree to 1e-10.  `times` must
// be non-negative and strictly increasing.
AmplitudeTrajectory semiclassical_evolve(const FullFrameParams& p,
                                         std::complex<double> a0,
                                         std::complex<double> b0,
                                         const std::vector<double>& times);

// Same trajectory through the matrix exponential of the generator, via the
// closed-form eigendecomposition; falls back to the degenerate
// (polynomial-in-t) form when the eigenvalues coalesce.
AmplitudeTrajectory propagator_evolve(const Eigen::Matrix2cd& h,
                                      std::complex<double> a0,
                                      std::complex<double> b0,
                                      const std::vector<double>& times);

// Callback receiving the density matrix at each recorded sample time; used
// by diagnostics (e.g. positivity spot checks).  May be empty.
using DensityObserver =
    std::function<void(double t, const Eigen::MatrixXcd& rho)>;

// Full master equation on the truncated two-mode Fock space (dimension
// (n_max+1)^2), with independent per-mode loss at rate gamma0 and a shared
// dissipative channel on (a+b)/sqrt(2) at rate 2*Gamma, starting from a
// truncated two-mode coherent state.  RK4 with the configured fixed step.
// Throws CutoffLeak when the top Fock level of either mode holds more than
// 1e-6 population at any sample (including the initial state).
AmplitudeTrajectory lindblad_evolve(const FullFrameParams& p,
                                    const FockLindbladConfig& cfg,
                                    const DensityObserver& observer = {});

// Runs the three routes against each other (mean equations vs propagator
// at 1e-8; master-equation first moments vs mean equations at 1e-6, when
// gamma0 >= 0) plus a trace-preservation check, and reports per-leg
// deviations.
CrossValidationReport cross_validate(const FullFrameParams& p,
                                     const FockLindbladConfig& cfg);

}  // namespace aptsense
