#pragma once

namespace aptsense {

// Rates and detuning of the dissipatively coupled two-mode model.  All
// quantities are angular rates in a common unit; the usual convention is
// to measure everything in units of the coupling rate (big_gamma = 1).
struct SystemParams {
  double delta = 0.0;       // mode detuning omega_a - omega_b
  double big_gamma = 1.0;   // shared-bath dissipative coupling rate
  double gamma0 = 0.0;      // balanced per-mode rate (negative = gain)
  double gamma_c = 0.0;     // probe (readout) channel coupling rate
  double gamma_bath = 1.0;  // noise rate of the shared dissipative channel

  // Loss left over once the probe channel is split off the balanced rate.
  double intrinsic_loss() const {
    double g = gamma0 - gamma_c;
    return g < 0.0 ? -g : g;
  }

  // Throws std::invalid_argument on non-finite fields, big_gamma < 0,
  // gamma_c < 0 or gamma_bath < 0.
  void validate() const;
};

// Convenience constructor; gamma_bath defaults to big_gamma.
SystemParams make_params(double delta, double big_gamma, double gamma0,
                         double gamma_c = 0.0);

// Lab-frame description: absolute mode frequencies instead of a detuning.
struct FullFrameParams {
  double omega_a = 0.0;
  double omega_b = 0.0;
  SystemParams sys;

  double rotating_frame_frequency() const { return 0.5 * (omega_a + omega_b); }

  // Additionally requires omega_a, omega_b >= 0 and
  // omega_a - omega_b == sys.delta (exactly, as set by make_full_frame).
  void validate() const;
};

FullFrameParams make_full_frame(double omega_a, double omega_b,
                                double big_gamma, double gamma0,
                                double gamma_c = 0.0);

}  // namespace aptsense
