#include "aptsense/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "aptsense/errors.hpp"
#include "aptsense/hamiltonian.hpp"

namespace aptsense {

namespace {

using std::complex;
using Vec2 = Eigen::Vector2cd;

void validate_times(const std::vector<double>& times) {
  if (times.empty()) {
    throw std::invalid_argument("time grid must be non-empty");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) {
      throw std::invalid_argument("times must be finite and non-negative");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("times must be strictly increasing");
    }
  }
}

Vec2 rk4_fixed(const Eigen::Matrix2cd& k, Vec2 y, double t_span, int nsteps) {
  const double h = t_span / nsteps;
  for (int i = 0; i < nsteps; ++i) {
    const Vec2 k1 = k * y;
    const Vec2 k2 = k * (y + 0.5 * h * k1);
    const Vec2 k3 = k * (y + 0.5 * h * k2);
    const Vec2 k4 = k * (y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

// Integrates y' = k*y over t_span, doubling the step count until two
// consecutive refinements agree to 1e-10 (sup norm, relative).
Vec2 rk4_adaptive(const Eigen::Matrix2cd& k, const Vec2& y0, double t_span) {
  const double rate = k.cwiseAbs().maxCoeff();
  int n = std::max(1, static_cast<int>(std::ceil(t_span * rate / 0.01)));
  Vec2 prev = rk4_fixed(k, y0, t_span, n);
  for (int iter = 0; iter < 24; ++iter) {
    n *= 2;
    const Vec2 next = rk4_fixed(k, y0, t_span, n);
    const double err = (next - prev).cwiseAbs().maxCoeff();
    const double ref = std::max(1.0, next.cwiseAbs().maxCoeff());
    if (err <= 1e-10 * ref) return next;
    prev = next;
  }
  throw std::runtime_error("rk4_adaptive: step halving did not converge");
}

}  // namespace

bool CrossValidationReport::all_passed() const {
  for (const Leg& leg : legs) {
    if (leg.ran && !leg.passed) return false;
  }
  return true;
}

AmplitudeTrajectory semiclassical_evolve(const FullFrameParams& p,
                                         complex<double> a0,
                                         complex<double> b0,
                                         const std::vector<double>& times) {
  p.validate();
  validate_times(times);
  const Eigen::Matrix2cd k =
      complex<double>(0.0, -1.0) * build_full_hamiltonian(p);

  AmplitudeTrajectory traj;
  traj.times = times;
  traj.a_mean.reserve(times.size());
  traj.b_mean.reserve(times.size());

  Vec2 y(a0, b0);
  double t = 0.0;
  for (double target : times) {
    if (target > t) {
      y = rk4_adaptive(k, y, target - t);
      t = target;
    }
    traj.a_mean.push_back(y(0));
    traj.b_mean.push_back(y(1));
  }
  return traj;
}

AmplitudeTrajectory propagator_evolve(const Eigen::Matrix2cd& h,
                                      complex<double> a0, complex<double> b0,
                                      const std::vector<double>& times) {
  if (!h.allFinite()) {
    throw NonFiniteMatrix("propagator_evolve: non-finite generator");
  }
  validate_times(times);

  const complex<double> im(0.0, 1.0);
  const complex<double> mean = 0.5 * (h(0, 0) + h(1, 1));
  const complex<double> half_diff = 0.5 * (h(0, 0) - h(1, 1));
  complex<double> disc = half_diff * half_diff + h(0, 1) * h(1, 0);
  if (disc.imag() == 0.0) disc = complex<double>(disc.real(), 0.0);
  const complex<double> root = std::sqrt(disc);
  const double h_norm = h.cwiseAbs().maxCoeff();

  AmplitudeTrajectory traj;
  traj.times = times;
  traj.a_mean.reserve(times.size());
  traj.b_mean.reserve(times.size());
  const Vec2 y0(a0, b0);

  if (std::abs(root) <= 1e-8 * std::max(1.0, h_norm)) {
    // Coalesced generator: exp(-i h t) = e^{-i mean t} (I - i t N) with
    // N = h - mean*I, N^2 = disc*I ~ 0.
    Eigen::Matrix2cd nilp = h;
    nilp(0, 0) -= mean;
    nilp(1, 1) -= mean;
    const Vec2 ny0 = nilp * y0;
    for (double t : times) {
      const complex<double> phase = std::exp(-im * mean * t);
      const Vec2 y = phase * (y0 - im * t * ny0);
      traj.a_mean.push_back(y(0));
      traj.b_mean.push_back(y(1));
    }
    return traj;
  }

  const complex<double> lp = mean + root;
  const complex<double> lm = mean - root;
  auto eigvec = [&](const complex<double>& lambda) {
    Vec2 v1(h(0, 1), lambda - h(0, 0));
    Vec2 v2(lambda - h(1, 1), h(1, 0));
    return v1.norm() >= v2.norm() ? v1 : v2;
  };
  const Vec2 vp = eigvec(lp);
  const Vec2 vm = eigvec(lm);
  Eigen::Matrix2cd basis;
  basis.col(0) = vp;
  basis.col(1) = vm;
  const Vec2 coeffs = basis.partialPivLu().solve(y0);
  for (double t : times) {
    const Vec2 y = coeffs(0) * std::exp(-im * lp * t) * vp +
                   coeffs(1) * std::exp(-im * lm * t) * vm;
    traj.a_mean.push_back(y(0));
    traj.b_mean.push_back(y(1));
  }
  return traj;
}

void FockLindbladConfig::validate(const FullFrameParams& p) const {
  p.validate();
  if (p.sys.gamma0 < 0.0) {
    throw GainNotLindblad(
        "negative balanced rate: gain has no loss-form dissipator");
  }
  if (n_max < 1 || n_max > 64) {
    throw std::invalid_argument("n_max must lie in [1, 64]");
  }
  if (!std::isfinite(alpha_a.real()) || !std::isfinite(alpha_a.imag()) ||
      !std::isfinite(alpha_b.real()) || !std::isfinite(alpha_b.imag())) {
    throw std::invalid_argument("initial amplitudes must be finite");
  }
  // Cutoff adequacy heuristic: mean occupation well below the kept ladder.
  if (std::max(std::norm(alpha_a), std::norm(alpha_b)) > 0.25 * n_max) {
    throw std::invalid_argument(
        "cutoff too low for the initial amplitudes: need |alpha|^2 <= n_max/4");
  }
  if (!std::isfinite(dt) || !(dt > 0.0) || !std::isfinite(t_final) ||
      !(t_final >= dt)) {
    throw std::invalid_argument("need 0 < dt <= t_final, finite");
  }
  const double max_rate = std::max(
      {p.omega_a, p.omega_b, p.sys.gamma0, 2.0 * p.sys.big_gamma});
  if (max_rate > 0.0 && dt > 0.01 / max_rate) {
    throw std::invalid_argument("dt too coarse: need dt <= 0.01 / max rate");
  }
}

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
  Eigen::MatrixXcd out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return out;
}

}  // namespace

AmplitudeTrajectory lindblad_evolve(const FullFrameParams& p,
                                    const FockLindbladConfig& cfg,
                                    const DensityObserver& observer) {
  cfg.validate(p);
  const int d = cfg.n_max + 1;
  const int dim = d * d;
  using Mat = Eigen::MatrixXcd;

  Mat lower = Mat::Zero(d, d);
  for (int n = 1; n < d; ++n) lower(n - 1, n) = std::sqrt(double(n));
  const Mat eye = Mat::Identity(d, d);
  const Mat op_a = kron(lower, eye);
  const Mat op_b = kron(eye, lower);
  const Mat op_c = (op_a + op_b) / std::sqrt(2.0);

  Mat hmat = p.omega_a * (op_a.adjoint() * op_a).eval() +
             p.omega_b * (op_b.adjoint() * op_b).eval();

  struct Channel {
    double rate;
    Mat op;
  };
  const std::vector<Channel> channels = {
      {p.sys.gamma0, op_a}, {p.sys.gamma0, op_b}, {2.0 * p.sys.big_gamma, op_c}};

  // rho' = M rho + rho M^H + sum_k 2 r_k op rho op^H, with the drift
  // M = -iH - sum_k r_k op^H op absorbing the anticommutator halves.
  const complex<double> im(0.0, 1.0);
  Mat drift = -im * hmat;
  for (const Channel& ch : channels) {
    drift -= ch.rate * (ch.op.adjoint() * ch.op).eval();
  }

  // Truncated coherent state, renormalised on the cutoff space.
  auto coherent = [&](complex<double> alpha) {
    Eigen::VectorXcd v(d);
    complex<double> amp(1.0, 0.0);
    for (int n = 0; n < d; ++n) {
      v(n) = amp;
      amp *= alpha / std::sqrt(double(n + 1));
    }
    v.normalize();
    return v;
  };
  const Eigen::VectorXcd psi0 =
      kron(coherent(cfg.alpha_a), coherent(cfg.alpha_b));
  Mat rho = psi0 * psi0.adjoint();

  // Index sets for the top Fock level of each mode (union, no double count).
  std::vector<int> top_levels;
  for (int i = 0; i < dim; ++i) {
    const int na = i / d, nb = i % d;
    if (na == cfg.n_max || nb == cfg.n_max) top_levels.push_back(i);
  }

  auto rhs = [&](const Mat& r) {
    Mat out = drift * r;
    out += r * drift.adjoint();
    for (const Channel& ch : channels) {
      if (ch.rate == 0.0) continue;
      out.noalias() += (2.0 * ch.rate) * (ch.op * r * ch.op.adjoint());
    }
    return out;
  };

  const int nsteps =
      std::max(1, static_cast<int>(std::floor(cfg.t_final / cfg.dt + 1e-9)));

  AmplitudeTrajectory traj;
  traj.times.reserve(nsteps + 1);
  traj.a_mean.reserve(nsteps + 1);
  traj.b_mean.reserve(nsteps + 1);
  traj.trace_drift.reserve(nsteps + 1);

  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.a_mean.push_back((op_a * rho).trace());
    traj.b_mean.push_back((op_b * rho).trace());
    traj.trace_drift.push_back(std::abs(rho.trace() - complex<double>(1.0)));
    double top = 0.0;
    for (int i : top_levels) top += rho(i, i).real();
    if (top > 1e-6) {
      throw CutoffLeak(t, top,
                       "lindblad_evolve: top Fock level holds " +
                           std::to_string(top) + " population at t = " +
                           std::to_string(t) + "; raise n_max");
    }
    if (observer) observer(t, rho);
  };

  record(0.0);
  const double h = cfg.dt;
  for (int s = 1; s <= nsteps; ++s) {
    const Mat k1 = rhs(rho);
    const Mat k2 = rhs(rho + 0.5 * h * k1);
    const Mat k3 = rhs(rho + 0.5 * h * k2);
    const Mat k4 = rhs(rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(s * h);
  }
  return traj;
}

CrossValidationReport cross_validate(const FullFrameParams& p,
                                     const FockLindbladConfig& cfg) {
  p.validate();
  CrossValidationReport report;

  // Leg 1: adaptive integration of the mean equations against the
  // closed-form propagator.
  {
    std::vector<double> times;
    const int n = 200;
    times.reserve(n + 1);
    for (int i = 0; i <= n; ++i) times.push_back(cfg.t_final * i / n);
    times.erase(times.begin());  // evolve from t=0, compare at t>0
    const AmplitudeTrajectory ode =
        semiclassical_evolve(p, cfg.alpha_a, cfg.alpha_b, times);
    const AmplitudeTrajectory prop = propagator_evolve(
        build_full_hamiltonian(p), cfg.alpha_a, cfg.alpha_b, times);
    double dev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      dev = std::max(dev, std::abs(ode.a_mean[i] - prop.a_mean[i]));
      dev = std::max(dev, std::abs(ode.b_mean[i] - prop.b_mean[i]));
    }
    report.legs.push_back(
        {"mean-vs-propagator", true, dev <= 1e-8, dev, ""});
  }

  // Legs 2 and 3 need the master equation, which only exists for loss.
  if (p.sys.gamma0 < 0.0) {
    report.legs.push_back({"lindblad-vs-mean", false, false, 0.0,
                           "skipped: balanced gain has no loss-form "
                           "master equation"});
    report.legs.push_back({"trace-preservation", false, false, 0.0,
                           "skipped: no master-equation run"});
    return report;
  }

  const AmplitudeTrajectory lind = lindblad_evolve(p, cfg);
  const AmplitudeTrajectory ode = semiclassical_evolve(
      p, cfg.alpha_a, cfg.alpha_b,
      std::vector<double>(lind.times.begin() + 1, lind.times.end()));
  double dev = 0.0;
  for (std::size_t i = 0; i < ode.times.size(); ++i) {
    dev = std::max(dev, std::abs(lind.a_mean[i + 1] - ode.a_mean[i]));
    dev = std::max(dev, std::abs(lind.b_mean[i + 1] - ode.b_mean[i]));
  }
  report.legs.push_back({"lindblad-vs-mean", true, dev <= 1e-6, dev, ""});

  double drift = 0.0;
  for (double tr : lind.trace_drift) drift = std::max(drift, tr);
  report.legs.push_back(
      {"trace-preservation", true, drift <= 1e-8, drift, ""});
  return report;
}

}  // namespace aptsense
