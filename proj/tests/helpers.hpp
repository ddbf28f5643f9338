#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>

#include <aptsense/params.hpp>

namespace testutil {

template <typename A, typename B>
double max_abs_diff(const A& a, const B& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Deterministic parameter draws over the physically interesting box.
struct ParamSampler {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  explicit ParamSampler(unsigned long long seed) : rng(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(rng); }

  aptsense::SystemParams draw() {
    aptsense::SystemParams p;
    p.delta = uniform(-3.0, 3.0);
    p.big_gamma = uniform(0.05, 3.0);
    p.gamma0 = uniform(-2.0, 2.0);
    p.gamma_c = 0.0;
    p.gamma_bath = p.big_gamma;
    return p;
  }
};

}  // namespace testutil
