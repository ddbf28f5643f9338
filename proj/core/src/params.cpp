#include "aptsense/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aptsense {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be finite");
  }
}

}  // namespace

void SystemParams::validate() const {
  require_finite(delta, "delta");
  require_finite(big_gamma, "big_gamma");
  require_finite(gamma0, "gamma0");
  require_finite(gamma_c, "gamma_c");
  require_finite(gamma_bath, "gamma_bath");
  // The degenerate big_gamma = 0 (decoupled pair) is a legal limit used by
  // sanity checks; only negative coupling is rejected.
  if (big_gamma < 0.0) {
    throw std::invalid_argument("big_gamma must be non-negative");
  }
  if (gamma_c < 0.0) {
    throw std::invalid_argument("gamma_c must be non-negative");
  }
  if (gamma_bath < 0.0) {
    throw std::invalid_argument("gamma_bath must be non-negative");
  }
}

SystemParams make_params(double delta, double big_gamma, double gamma0,
                         double gamma_c) {
  SystemParams p;
  p.delta = delta;
  p.big_gamma = big_gamma;
  p.gamma0 = gamma0;
  p.gamma_c = gamma_c;
  p.gamma_bath = big_gamma;
  p.validate();
  return p;
}

void FullFrameParams::validate() const {
  require_finite(omega_a, "omega_a");
  require_finite(omega_b, "omega_b");
  if (omega_a < 0.0 || omega_b < 0.0) {
    throw std::invalid_argument("mode frequencies must be non-negative");
  }
  if (omega_a - omega_b != sys.delta) {
    throw std::invalid_argument("omega_a - omega_b must equal delta");
  }
  sys.validate();
}

FullFrameParams make_full_frame(double omega_a, double omega_b,
                                double big_gamma, double gamma0,
                                double gamma_c) {
  FullFrameParams p;
  p.omega_a = omega_a;
  p.omega_b = omega_b;
  p.sys = make_params(omega_a - omega_b, big_gamma, gamma0, gamma_c);
  p.validate();
  return p;
}

}  // namespace aptsense
