#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <aptsense/errors.hpp>
#include <aptsense/hamiltonian.hpp>

#include "helpers.hpp"

using namespace aptsense;
using testutil::max_abs_diff;
using std::complex;

namespace {
const complex<double> kI(0.0, 1.0);

Eigen::Matrix2cd mat2(complex<double> a, complex<double> b, complex<double> c,
                      complex<double> d) {
  Eigen::Matrix2cd m;
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST_CASE("effective matrix assembles detuning and rates in the block pattern") {
  CHECK(max_abs_diff(build_effective_hamiltonian(make_params(0.0, 1.0, 1.0)),
                     mat2(-2.0 * kI, -kI, -kI, -2.0 * kI)) == 0.0);
  CHECK(max_abs_diff(build_effective_hamiltonian(make_params(2.0, 1.0, -1.0)),
                     mat2(1.0, -kI, -kI, -1.0)) == 0.0);
  CHECK(max_abs_diff(build_effective_hamiltonian(make_params(4.0, 0.5, 0.0)),
                     mat2(2.0 - 0.5 * kI, -0.5 * kI, -0.5 * kI,
                          -2.0 - 0.5 * kI)) == 0.0);
}

TEST_CASE("lab-frame matrix is the rotating-frame matrix shifted by the mean") {
  const Eigen::Matrix2cd shift = Eigen::Matrix2cd::Identity();

  const FullFrameParams degenerate = make_full_frame(5.0, 5.0, 1.0, 1.0);
  CHECK(max_abs_diff(build_full_hamiltonian(degenerate),
                     build_effective_hamiltonian(degenerate.sys) +
                         5.0 * shift) == 0.0);

  const FullFrameParams detuned = make_full_frame(6.0, 4.0, 1.0, -1.0);
  CHECK(max_abs_diff(build_full_hamiltonian(detuned) - 5.0 * shift,
                     build_effective_hamiltonian(make_params(2.0, 1.0, -1.0)))
        == 0.0);

  const FullFrameParams zero = make_full_frame(0.0, 0.0, 1.0, 0.5);
  CHECK(max_abs_diff(build_full_hamiltonian(zero),
                     build_effective_hamiltonian(zero.sys)) == 0.0);
}

TEST_CASE("below threshold detuning the eigenvalues split along the imaginary axis") {
  const Spectrum s =
      eigensystem(build_effective_hamiltonian(make_params(0.0, 1.0, 1.0)));
  CHECK(std::abs(s.lambda_plus - (-kI)) < 1e-14);
  CHECK(std::abs(s.lambda_minus - (-3.0 * kI)) < 1e-14);
  CHECK(s.phase == Phase::Unbroken);

  // The slower eigenmode is the antisymmetric combination.
  CHECK(std::abs(s.psi_plus(1) - 1.0) < 1e-14);
  CHECK(std::abs(s.psi_plus(0) + 1.0) < 1e-14);
  CHECK(std::abs(s.psi_minus(1) - 1.0) < 1e-14);
  CHECK(std::abs(s.psi_minus(0) - 1.0) < 1e-14);
}

TEST_CASE("above threshold detuning the eigenvalues split along the real axis") {
  const Spectrum s =
      eigensystem(build_effective_hamiltonian(make_params(4.0, 1.0, 0.0)));
  const double root3 = std::sqrt(3.0);
  CHECK(std::abs(s.lambda_plus - (root3 - kI)) < 1e-12);
  CHECK(std::abs(s.lambda_minus - (-root3 - kI)) < 1e-12);
  CHECK(s.phase == Phase::Broken);
}

TEST_CASE("at the critical detuning both eigenpairs coalesce") {
  // Balanced gain: the degenerate eigenvalue sits at the origin.
  const Spectrum gain =
      eigensystem(build_effective_hamiltonian(make_params(2.0, 1.0, -1.0)));
  CHECK(std::abs(gain.lambda_plus) < 1e-12);
  CHECK(std::abs(gain.lambda_minus) < 1e-12);
  CHECK(gain.phase == Phase::ExceptionalPoint);
  CHECK(std::abs(gain.lambda_plus - gain.lambda_minus) < 1e-12);

  // One shared eigenvector, proportional to (i, 1).
  CHECK(max_abs_diff(gain.psi_plus, gain.psi_minus) == 0.0);
  CHECK(std::abs(gain.psi_plus(1) - 1.0) < 1e-12);
  CHECK(std::abs(gain.psi_plus(0) - kI) < 1e-12);

  // Lossy variant: same coalescence, shifted down the imaginary axis.
  const Spectrum lossy =
      eigensystem(build_effective_hamiltonian(make_params(2.0, 1.0, 0.0)));
  CHECK(std::abs(lossy.lambda_plus - (-kI)) < 1e-12);
  CHECK(std::abs(lossy.lambda_minus - (-kI)) < 1e-12);
  CHECK(lossy.phase == Phase::ExceptionalPoint);
}

TEST_CASE("eigenvalues order by real part, then by imaginary part") {
  testutil::ParamSampler sampler(2024);
  for (int i = 0; i < 200; ++i) {
    const SystemParams p = sampler.draw();
    const Spectrum s = eigensystem(build_effective_hamiltonian(p));
    const bool re_ordered =
        s.lambda_plus.real() > s.lambda_minus.real() + 1e-15;
    const bool re_tied =
        std::abs(s.lambda_plus.real() - s.lambda_minus.real()) <= 1e-12;
    CHECK((re_ordered ||
           (re_tied && s.lambda_plus.imag() >= s.lambda_minus.imag())));
  }
}

TEST_CASE("closed-form eigensystem matches a general-purpose solver") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    Eigen::Matrix2cd h;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) h(r, c) = complex<double>(u(rng), u(rng));

    const Spectrum s = eigensystem(h);
    const double scale = h.cwiseAbs().maxCoeff();

    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(h);
    std::array<complex<double>, 2> ref = {solver.eigenvalues()(0),
                                          solver.eigenvalues()(1)};
    std::sort(ref.begin(), ref.end(), [](const auto& a, const auto& b) {
      if (a.real() != b.real()) return a.real() > b.real();
      return a.imag() > b.imag();
    });
    CHECK(std::abs(s.lambda_plus - ref[0]) < 1e-12 * std::max(1.0, scale));
    CHECK(std::abs(s.lambda_minus - ref[1]) < 1e-12 * std::max(1.0, scale));

    CHECK((h * s.psi_plus - s.lambda_plus * s.psi_plus).norm() <
          1e-10 * scale * s.psi_plus.norm());
    CHECK((h * s.psi_minus - s.lambda_minus * s.psi_minus).norm() <
          1e-10 * scale * s.psi_minus.norm());
  }
}

TEST_CASE("non-finite input is rejected") {
  Eigen::Matrix2cd h = Eigen::Matrix2cd::Identity();
  h(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eigensystem(h), NonFiniteMatrix);
}

TEST_CASE("a scalar matrix keeps the canonical basis instead of a defective pair") {
  const Eigen::Matrix2cd h = 3.0 * Eigen::Matrix2cd::Identity();
  const Spectrum s = eigensystem(h);
  CHECK(std::abs(s.lambda_plus - 3.0) < 1e-15);
  CHECK(std::abs(s.lambda_minus - 3.0) < 1e-15);
  CHECK(std::abs(s.psi_plus(0) - 1.0) < 1e-15);
  CHECK(std::abs(s.psi_plus(1)) < 1e-15);
  CHECK(std::abs(s.psi_minus(0)) < 1e-15);
  CHECK(std::abs(s.psi_minus(1) - 1.0) < 1e-15);
}

TEST_CASE("phase classification keys on the detuning-to-coupling ratio") {
  CHECK(classify_phase(make_params(1.0, 1.0, 0.3)) == Phase::Unbroken);
  CHECK(classify_phase(make_params(-2.0, 1.0, 0.3)) ==
        Phase::ExceptionalPoint);
  CHECK(classify_phase(make_params(3.0, 1.0, 0.3)) == Phase::Broken);
  CHECK(std::string(to_string(Phase::Unbroken)) == "Unbroken");
  CHECK(std::string(to_string(Phase::Broken)) == "Broken");
  CHECK(std::string(to_string(Phase::ExceptionalPoint)) ==
        "ExceptionalPoint");
}

TEST_CASE("the antisymmetry residual vanishes for built matrices and not otherwise") {
  CHECK(check_anti_pt(Eigen::Matrix2cd::Identity()) == doctest::Approx(2.0));

  const Eigen::Matrix2cd h =
      build_effective_hamiltonian(make_params(0.7, 1.2, 0.3));
  CHECK(check_anti_pt(h) <= 1e-14);

  testutil::ParamSampler sampler(5150);
  for (int i = 0; i < 300; ++i) {
    const Eigen::Matrix2cd hh =
        build_effective_hamiltonian(sampler.draw());
    CHECK(check_anti_pt(hh) <= 1e-14 * hh.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("trace and determinant match the eigenvalue pair") {
  testutil::ParamSampler sampler(8912);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Matrix2cd h =
        build_effective_hamiltonian(sampler.draw());
    const Spectrum s = eigensystem(h);
    const complex<double> tr = h(0, 0) + h(1, 1);
    const complex<double> det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
    CHECK(std::abs(s.lambda_plus + s.lambda_minus - tr) <=
          1e-12 * std::max(1.0, std::abs(tr)));
    CHECK(std::abs(s.lambda_plus * s.lambda_minus - det) <=
          1e-12 * std::max(1.0, std::abs(det)));
  }
}

TEST_CASE("the lab frame shifts both eigenvalues by the mean frequency") {
  const FullFrameParams f = make_full_frame(7.0, 4.0, 1.2, 0.4);
  const Spectrum lab = eigensystem(build_full_hamiltonian(f));
  const Spectrum rot = eigensystem(build_effective_hamiltonian(f.sys));
  const double w0 = f.rotating_frame_frequency();
  CHECK(std::abs(lab.lambda_plus - (rot.lambda_plus + w0)) <=
        1e-12 * std::max(1.0, std::abs(lab.lambda_plus)));
  CHECK(std::abs(lab.lambda_minus - (rot.lambda_minus + w0)) <=
        1e-12 * std::max(1.0, std::abs(lab.lambda_minus)));
}

TEST_CASE("each phase constrains the eigenvalue symmetry it advertises") {
  testutil::ParamSampler sampler(31337);
  int seen_unbroken = 0, seen_broken = 0;
  for (int i = 0; i < 400; ++i) {
    const SystemParams p = sampler.draw();
    const Spectrum s = eigensystem(build_effective_hamiltonian(p));
    if (s.phase == Phase::Unbroken) {
      ++seen_unbroken;
      CHECK(std::abs(s.lambda_plus.real()) <= 1e-10 * p.big_gamma);
      CHECK(std::abs(s.lambda_minus.real()) <= 1e-10 * p.big_gamma);
    } else if (s.phase == Phase::Broken) {
      const double split =
          std::sqrt(0.25 * p.delta * p.delta - p.big_gamma * p.big_gamma);
      // Within cancellation distance of the transition the split itself
      // is not representable to 1e-10 relative; skip those draws.
      if (split <= 1e-3 * p.big_gamma) continue;
      ++seen_broken;
      CHECK(std::abs(s.lambda_plus.real() - split) <= 1e-10 * split);
      CHECK(std::abs(s.lambda_minus.real() + split) <= 1e-10 * split);
    }
  }
  // The draw box straddles the transition; both phases must show up.
  CHECK(seen_unbroken > 50);
  CHECK(seen_broken > 50);
}
