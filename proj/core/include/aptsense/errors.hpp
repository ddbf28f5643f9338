#pragma once

#include <stdexcept>
#include <string>

namespace aptsense {

// Invalid-input errors (caller bug or bad configuration).

struct NonFiniteMatrix : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested an analytic pole expansion at a parameter point that is not
// on any of the supported singular-response loci.
struct NotOnCriticalLocus : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A Lindblad evolution was requested with a negative balanced cavity rate;
// gain cannot be written as a loss dissipator.
struct GainNotLindblad : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical / domain errors (legal input, singular or unresolvable point).

// The response matrix is not invertible at the requested drive frequency.
struct SingularAtFrequency : std::runtime_error {
  explicit SingularAtFrequency(double omega_, const std::string& what_)
      : std::runtime_error(what_), omega(omega_) {}
  double omega;
};

// The output covariance matrix is not invertible, so the Fisher
// information is undefined at this point.
struct SingularCovariance : std::runtime_error {
  explicit SingularCovariance(double omega_, const std::string& what_)
      : std::runtime_error(what_), omega(omega_) {}
  double omega;
};

// Residue probes do not converge for the requested pole order.
struct WrongPoleOrder : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Too few usable samples survive the fit window to estimate a slope.
struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Population reached the top of the truncated Fock ladder; results past
// this point are not trustworthy.
struct CutoffLeak : std::runtime_error {
  explicit CutoffLeak(double time_, double population_, const std::string& what_)
      : std::runtime_error(what_), time(time_), population(population_) {}
  double time;
  double population;
};

}  // namespace aptsense
