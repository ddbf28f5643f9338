// Command-line front end for the dissipatively coupled two-mode toolkit:
// spectra, phase classification, critical frequencies, estimation-bound
// sweeps, pole expansions and self-validation, emitted as CSV or JSON.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <aptsense/dynamics.hpp>
#include <aptsense/errors.hpp>
#include <aptsense/hamiltonian.hpp>
#include <aptsense/laurent.hpp>
#include <aptsense/metrology.hpp>
#include <aptsense/params.hpp>
#include <aptsense/transfer.hpp>

#include "io.hpp"

namespace {

using namespace aptsense;
using cli::Table;
using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct OutputOpts {
  std::string format = "csv";
  std::string path = "-";
};

void attach_common(CLI::App* cmd, OutputOpts& o) {
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("-o,--output", o.path, "Output path ('-' for stdout)")
      ->capture_default_str();
  // Let --config (an app-level option) be written after the subcommand name.
  cmd->fallthrough();
}

void emit(const Table& t, const OutputOpts& o) {
  cli::write_output(o.path, o.format == "json" ? t.to_json() : t.to_csv());
}

json params_json(const SystemParams& p) {
  return json{{"delta", p.delta},
              {"Gamma", p.big_gamma},
              {"gamma0", p.gamma0},
              {"gamma_c", p.gamma_c},
              {"gamma_bath", p.gamma_bath}};
}

json grid_json(const cli::GridSpec& spec, bool log_spacing,
               const std::string& quantity, double center = 0.0) {
  return json{{"start", spec.start},
              {"stop", spec.stop},
              {"count", spec.count},
              {"spacing", log_spacing ? "log" : "linear"},
              {"quantity", quantity},
              {"center", center}};
}

// ---- spectrum -----------------------------------------------------------

struct SpectrumOpts {
  double gamma0 = 1.0;
  double big_gamma = 1.0;
  std::string range = "-4:4:401";
  bool log_spacing = false;
  double ep_tol = kDefaultEpTol;
  OutputOpts out;
};

void run_spectrum(const SpectrumOpts& o) {
  const cli::GridSpec spec = cli::parse_grid(o.range);
  const std::vector<double> deltas = cli::expand_grid(spec, o.log_spacing);

  Table t;
  t.columns = {"delta", "re_lambda_plus", "re_lambda_minus", "im_lambda_plus",
               "im_lambda_minus"};
  for (double d : deltas) {
    const SystemParams p = make_params(d, o.big_gamma, o.gamma0);
    const Spectrum s =
        eigensystem(build_effective_hamiltonian(p), o.ep_tol);
    t.add_row({d, s.lambda_plus.real(), s.lambda_minus.real(),
               s.lambda_plus.imag(), s.lambda_minus.imag()});
  }
  t.meta["params"] = json{
      {"gamma0", o.gamma0}, {"Gamma", o.big_gamma}, {"ep_tol", o.ep_tol}};
  t.meta["grid"] = grid_json(spec, o.log_spacing, "delta");
  emit(t, o.out);
}

// ---- phase --------------------------------------------------------------

struct PhaseOpts {
  double gamma0 = 1.0;
  double big_gamma = 1.0;
  double delta = 0.0;
  double ep_tol = kDefaultEpTol;
  OutputOpts out;
};

void run_phase(const PhaseOpts& o) {
  const SystemParams p = make_params(o.delta, o.big_gamma, o.gamma0);
  const Eigen::Matrix2cd h = build_effective_hamiltonian(p);
  const Spectrum s = eigensystem(h, o.ep_tol);
  const Phase phase = classify_phase(p, o.ep_tol);

  Table t;
  t.columns = {"delta",          "Gamma",          "gamma0",
               "phase",          "re_lambda_plus", "im_lambda_plus",
               "re_lambda_minus", "im_lambda_minus", "anti_pt_residual"};
  t.add_row({o.delta, o.big_gamma, o.gamma0, std::string(to_string(phase)),
             s.lambda_plus.real(), s.lambda_plus.imag(),
             s.lambda_minus.real(), s.lambda_minus.imag(), check_anti_pt(h)});
  t.meta["params"] = params_json(p);
  t.meta["grid"] = json::object();
  emit(t, o.out);
}

// ---- critical -----------------------------------------------------------

struct CriticalOpts {
  double gamma0 = 1.0;
  double big_gamma = 1.0;
  double delta = 0.0;
  OutputOpts out;
};

void run_critical(const CriticalOpts& o) {
  const SystemParams p = make_params(o.delta, o.big_gamma, o.gamma0);
  const CriticalFrequencies cf = critical_frequencies(p);

  Table t;
  t.columns = {"case",
               "omega_sq_plus_re",
               "omega_sq_plus_im",
               "omega_sq_minus_re",
               "omega_sq_minus_im",
               "root",
               "abs_det_at_root"};
  const std::string label = to_string(cf.case_label);
  if (cf.real_roots.empty()) {
    t.add_row({label, cf.omega_sq_plus.real(), cf.omega_sq_plus.imag(),
               cf.omega_sq_minus.real(), cf.omega_sq_minus.imag(), kNan,
               kNan});
  } else {
    for (double r : cf.real_roots) {
      t.add_row({label, cf.omega_sq_plus.real(), cf.omega_sq_plus.imag(),
                 cf.omega_sq_minus.real(), cf.omega_sq_minus.imag(), r,
                 std::abs(transfer_determinant(p, r))});
    }
  }
  t.meta["params"] = params_json(p);
  t.meta["grid"] = json::object();
  emit(t, o.out);
}

// ---- qcrb ---------------------------------------------------------------

struct QcrbOpts {
  double big_gamma = 1.0;
  double epsilon = 0.0;
  bool has_epsilon = false;
  double delta = 0.0;
  bool has_delta = false;
  double gamma0 = 0.0;
  bool has_gamma0 = false;
  double gamma_c = 0.5;
  double gamma_bath = -1.0;  // sentinel: default to Gamma
  std::vector<double> mu_in{2.0, 2.0, 0.0, 0.0};
  std::string cov_mode = "symmetric";
  double derivative_step = 1e-6;
  std::string range;
  bool log_spacing = false;
  double center = 0.0;
  bool center_root = false;
  OutputOpts out;
};

SystemParams resolve_qcrb_params(const QcrbOpts& o) {
  double delta = o.delta, gamma0 = o.gamma0;
  if (o.has_epsilon) {
    if (!(o.epsilon > -2.0)) {
      throw std::invalid_argument("--epsilon must be > -2");
    }
    // Distance from the coalescence detuning in units of Gamma.  At and
    // beyond the coalescence the balanced-gain line gamma0 = -Gamma is
    // singular-response; inside it the singular line bends onto the
    // zero-frequency lasing locus, so gamma0 follows that branch there
    // (the two agree in the epsilon -> 0 limit).
    delta = (2.0 + o.epsilon) * o.big_gamma;
    if (o.epsilon >= 0.0) {
      gamma0 = -o.big_gamma;
    } else {
      gamma0 = -o.big_gamma + std::sqrt(o.big_gamma * o.big_gamma -
                                        0.25 * delta * delta);
    }
  } else if (!o.has_delta || !o.has_gamma0) {
    throw std::invalid_argument(
        "qcrb: give --epsilon, or both --delta and --gamma0");
  }
  SystemParams p;
  p.delta = delta;
  p.big_gamma = o.big_gamma;
  p.gamma0 = gamma0;
  p.gamma_c = o.gamma_c;
  p.gamma_bath = o.gamma_bath < 0.0 ? o.big_gamma : o.gamma_bath;
  p.validate();
  return p;
}

ProbeConfig resolve_probe(const std::vector<double>& mu_in,
                          const std::string& cov_mode, double step) {
  ProbeConfig probe;
  if (mu_in.size() != 4) {
    throw std::invalid_argument("--mu-in needs exactly 4 values");
  }
  probe.mu_in = Eigen::Vector4d(mu_in[0], mu_in[1], mu_in[2], mu_in[3]);
  probe.covariance_mode = cov_mode == "as-written"
                              ? CovarianceMode::AsWritten
                              : CovarianceMode::SymmetricVacuum;
  probe.derivative_step = step;
  return probe;
}

void run_qcrb(const QcrbOpts& o) {
  const SystemParams p = resolve_qcrb_params(o);
  const ProbeConfig probe =
      resolve_probe(o.mu_in, o.cov_mode, o.derivative_step);

  double center = o.center;
  if (o.center_root) {
    const CriticalFrequencies cf = critical_frequencies(p);
    const auto it = std::find_if(cf.real_roots.begin(), cf.real_roots.end(),
                                 [](double r) { return r >= 0.0; });
    if (it == cf.real_roots.end()) {
      throw std::runtime_error(
          "qcrb: --center-root requested but the response has no real "
          "critical frequency");
    }
    center = *it;
  }

  const cli::GridSpec spec = cli::parse_grid(o.range);
  std::vector<double> omegas = cli::expand_grid(spec, o.log_spacing);
  for (double& w : omegas) w += center;

  const QcrbSweep sweep = qcrb_sweep(p, omegas, probe);

  Table t;
  t.columns = {"omega", "qfi", "qcrb", "singular"};
  for (const QcrbSweep::Row& row : sweep.rows) {
    t.add_row({row.omega, row.qfi, row.qcrb,
               static_cast<long long>(row.singular ? 1 : 0)});
  }
  t.meta["params"] = params_json(p);
  t.meta["probe"] = json{
      {"mu_in", o.mu_in},
      {"covariance_mode", o.cov_mode},
      {"derivative_step", o.derivative_step}};
  t.meta["grid"] = grid_json(spec, o.log_spacing, "omega_offset", center);
  emit(t, o.out);
}

// ---- laurent ------------------------------------------------------------

struct LaurentOpts {
  double gamma0 = 0.0;
  double big_gamma = 1.0;
  double delta = 0.0;
  std::vector<double> radii{1e-2, 1e-3, 1e-4};
  OutputOpts out;
};

void run_laurent(const LaurentOpts& o) {
  const SystemParams p = make_params(o.delta, o.big_gamma, o.gamma0);
  const LaurentExpansion expansion = analytic_laurent(p);
  const ResidueReport residue =
      numerical_residue(p, expansion.omega0, expansion.order_m, o.radii);

  Table t;
  t.columns = {"case", "omega0", "order_m", "row",
               "col",  "analytic", "numerical", "abs_error"};
  const std::string label = to_string(expansion.case_label);
  double max_err = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double err =
          std::abs(expansion.coefficient(i, j) - residue.limit(i, j));
      max_err = std::max(max_err, err);
      t.add_row({label, expansion.omega0,
                 static_cast<long long>(expansion.order_m),
                 static_cast<long long>(i), static_cast<long long>(j),
                 expansion.coefficient(i, j), residue.limit(i, j), err});
    }
  }
  t.meta["params"] = params_json(p);
  t.meta["radii"] = o.radii;
  t.meta["deviations"] = residue.deviations;
  t.meta["max_abs_error"] = max_err;
  emit(t, o.out);
}

// ---- pole-fit -----------------------------------------------------------

struct PoleFitOpts {
  std::string input = "-";
  double omega0 = 0.0;
  std::string window;
  double derivative_step = 1e-6;
  bool has_step = false;
  double big_gamma = 1.0;
  bool has_gamma = false;
  OutputOpts out;
};

QcrbSweep parse_sweep_csv(const std::string& content) {
  QcrbSweep sweep;
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= content.size()) return {};
    const std::size_t nl = content.find('\n', pos);
    std::string line = content.substr(
        pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? content.size() : nl + 1;
    return line;
  };
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return fields;
  };

  const std::vector<std::string> header = split(next_line());
  int iw = -1, iq = -1, ic = -1, is = -1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == "omega") iw = int(k);
    if (header[k] == "qfi") iq = int(k);
    if (header[k] == "qcrb") ic = int(k);
    if (header[k] == "singular") is = int(k);
  }
  if (iw < 0 || iq < 0 || ic < 0 || is < 0) {
    throw std::invalid_argument(
        "pole-fit: CSV header must contain omega,qfi,qcrb,singular");
  }
  while (pos < content.size()) {
    const std::string line = next_line();
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line);
    if (static_cast<int>(f.size()) <=
        std::max(std::max(iw, iq), std::max(ic, is))) {
      throw std::invalid_argument("pole-fit: short CSV row: '" + line + "'");
    }
    QcrbSweep::Row row;
    row.omega = std::strtod(f[iw].c_str(), nullptr);
    row.qfi = std::strtod(f[iq].c_str(), nullptr);
    row.qcrb = std::strtod(f[ic].c_str(), nullptr);
    row.singular = std::strtol(f[is].c_str(), nullptr, 10) != 0;
    sweep.rows.push_back(row);
  }
  return sweep;
}

void run_pole_fit(const PoleFitOpts& o) {
  const std::string content = cli::read_input(o.input);
  const std::size_t first = content.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    throw std::invalid_argument("pole-fit: empty input");
  }

  QcrbSweep sweep;
  double gamma = o.big_gamma;
  double step = o.derivative_step;
  if (content[first] == '{') {
    json j;
    try {
      j = json::parse(content);
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("pole-fit: bad JSON input: ") +
                                  e.what());
    }
    // File metadata supplies the scale/step unless given explicitly.
    if (!o.has_gamma && j.contains("params") &&
        j["params"].contains("Gamma")) {
      gamma = j["params"]["Gamma"].get<double>();
    }
    if (!o.has_step && j.contains("probe") &&
        j["probe"].contains("derivative_step")) {
      step = j["probe"]["derivative_step"].get<double>();
    }
    if (!j.contains("rows") || !j["rows"].is_array()) {
      throw std::invalid_argument("pole-fit: JSON input lacks a rows array");
    }
    for (const json& jrow : j["rows"]) {
      if (!jrow.is_array() || jrow.size() < 4 || !jrow[0].is_number()) {
        throw std::invalid_argument("pole-fit: malformed JSON row");
      }
      QcrbSweep::Row row;
      row.omega = jrow[0].get<double>();
      // Non-finite values serialise as null; treat them as singular rows.
      row.qfi = jrow[1].is_number()
                    ? jrow[1].get<double>()
                    : std::numeric_limits<double>::infinity();
      row.qcrb = jrow[2].is_number() ? jrow[2].get<double>() : 0.0;
      row.singular = jrow[3].is_number() ? jrow[3].get<double>() != 0.0
                                         : jrow[3].is_boolean() && jrow[3].get<bool>();
      if (!jrow[1].is_number() || !jrow[2].is_number()) row.singular = true;
      sweep.rows.push_back(row);
    }
  } else {
    sweep = parse_sweep_csv(content);
  }
  sweep.params.big_gamma = gamma;
  sweep.probe.derivative_step = step;

  const PoleFit fit =
      pole_order_fit(sweep, o.omega0, cli::parse_window(o.window));

  Table t;
  t.columns = {"m_estimate", "intercept", "r_squared",
               "window_lo",  "window_hi", "n_rows"};
  t.add_row({fit.m_estimate, fit.intercept, fit.r_squared, fit.window.first,
             fit.window.second, static_cast<long long>(fit.n_rows)});
  t.meta["omega0"] = o.omega0;
  t.meta["params"] = json{{"Gamma", gamma}};
  t.meta["probe"] = json{{"derivative_step", step}};
  emit(t, o.out);
}

// ---- validate -----------------------------------------------------------

struct ValidateOpts {
  std::string preset = "all";
  double t_final = 2.0;
  double dt = 1e-3;
  int n_max = 5;
  double alpha = 0.2;
  OutputOpts out;
};

struct CheckRow {
  std::string status;
  std::string name;
  double deviation;
  std::string note;
};

void run_preset(const std::string& name, const ValidateOpts& o,
                std::vector<CheckRow>& out, bool& all_ok) {
  FullFrameParams p;
  if (name == "lossy") {
    p = make_full_frame(1.0, 0.0, 1.0, 1.0);
  } else if (name == "gain-ep") {
    p = make_full_frame(2.0, 0.0, 1.0, -1.0);
  } else if (name == "decoupled") {
    p = make_full_frame(0.0, 0.0, 0.0, 1.0);
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  FockLindbladConfig cfg;
  cfg.n_max = o.n_max;
  cfg.alpha_a = cfg.alpha_b = o.alpha;
  cfg.dt = o.dt;
  cfg.t_final = o.t_final;

  const CrossValidationReport report = cross_validate(p, cfg);
  for (const auto& leg : report.legs) {
    const std::string status =
        leg.ran ? (leg.passed ? "PASS" : "FAIL") : "SKIP";
    if (leg.ran && !leg.passed) all_ok = false;
    out.push_back({status, name + "/" + leg.name, leg.max_deviation,
                   leg.note});
  }
}

void run_invariant_sweeps(std::vector<CheckRow>& out, bool& all_ok) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_params = [&]() {
    SystemParams p;
    p.delta = -3.0 + 6.0 * unit(rng);
    p.big_gamma = 0.05 + 2.95 * unit(rng);
    p.gamma0 = -2.0 + 4.0 * unit(rng);
    p.gamma_c = 0.0;
    p.gamma_bath = p.big_gamma;
    return p;
  };
  auto closed_det = [](const SystemParams& p, double w) {
    const double g = p.gamma0 + p.big_gamma;
    const double k = 0.25 * p.delta * p.delta - p.big_gamma * p.big_gamma;
    const double base = g * g - w * w + k;
    return base * base + 4.0 * g * g * w * w;
  };
  auto record = [&](const std::string& name, double dev, double tol) {
    const bool ok = dev <= tol;
    if (!ok) all_ok = false;
    out.push_back({ok ? "PASS" : "FAIL", "invariants/" + name, dev,
                   "tolerance " + cli::format_double(tol)});
  };
  const int n_draws = 200;

  double dev_apt = 0.0, dev_spec = 0.0, dev_vec = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const SystemParams p = draw_params();
    const Eigen::Matrix2cd h = build_effective_hamiltonian(p);
    const double scale = h.cwiseAbs().maxCoeff();
    dev_apt = std::max(dev_apt, check_anti_pt(h) / scale);

    const Spectrum s = eigensystem(h);
    const std::complex<double> tr = h(0, 0) + h(1, 1);
    const std::complex<double> det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
    dev_spec = std::max(
        dev_spec, std::abs(s.lambda_plus + s.lambda_minus - tr) /
                      std::max(1.0, std::abs(tr)));
    dev_spec = std::max(
        dev_spec, std::abs(s.lambda_plus * s.lambda_minus - det) /
                      std::max(1.0, std::abs(det)));

    dev_vec = std::max(
        dev_vec,
        (h * s.psi_plus - s.lambda_plus * s.psi_plus).norm() / scale);
    dev_vec = std::max(
        dev_vec,
        (h * s.psi_minus - s.lambda_minus * s.psi_minus).norm() / scale);
  }
  record("anti-pt-residual", dev_apt, 1e-14);
  record("spectral-consistency", dev_spec, 1e-12);
  record("eigenvector-residual", dev_vec, 1e-10);

  double dev_det = 0.0, dev_round = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const SystemParams p = draw_params();
    const double w = -5.0 + 10.0 * unit(rng);
    const double closed = closed_det(p, w);
    const double lu = transfer_determinant(p, w);
    dev_det = std::max(dev_det,
                       std::abs(lu - closed) / std::max(1.0, std::abs(closed)));
    if (std::abs(closed) < 1e-3) continue;  // stay away from singularities
    const Eigen::Matrix4d gmat = transfer_matrix(p, w).matrix;
    const Eigen::Matrix4d ginv = inverse_transfer_matrix(p, w).matrix;
    dev_round = std::max(
        dev_round, (gmat * ginv - Eigen::Matrix4d::Identity())
                       .cwiseAbs()
                       .maxCoeff());
  }
  record("determinant-factorisation", dev_det, 1e-10);
  record("transfer-round-trip", dev_round, 1e-10);

  double dev_psd = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    SystemParams p = draw_params();
    p.gamma0 = 2.0 * unit(rng);
    p.gamma_c = 2.0 * unit(rng);
    const double w = -5.0 + 10.0 * unit(rng);
    if (std::abs(closed_det(p, w)) < 1e-3) continue;
    ProbeConfig probe;
    const Eigen::Matrix4d v = output_covariance(p, w, probe).real();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(v);
    const double floor = -es.eigenvalues().minCoeff() /
                         std::max(1.0, v.cwiseAbs().maxCoeff());
    dev_psd = std::max(dev_psd, floor);
  }
  record("covariance-psd", dev_psd, 1e-10);
}

int run_validate(const ValidateOpts& o) {
  std::vector<CheckRow> checks;
  bool all_ok = true;

  std::vector<std::string> presets;
  if (o.preset == "all") {
    presets = {"lossy", "gain-ep", "decoupled"};
  } else {
    presets = {o.preset};
  }
  for (const std::string& name : presets) {
    run_preset(name, o, checks, all_ok);
  }
  run_invariant_sweeps(checks, all_ok);

  Table t;
  t.columns = {"status", "check", "max_deviation", "note"};
  for (const CheckRow& row : checks) {
    t.add_row({row.status, row.name, row.deviation, row.note});
  }
  t.meta["preset"] = o.preset;
  t.meta["all_passed"] = all_ok;
  emit(t, o.out);
  return all_ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Dissipatively coupled two-mode sensing toolkit: spectra, response "
      "singularities and estimation bounds"};
  app.require_subcommand(1);
  // Config processing happens at the app level; [section] names map onto
  // subcommands, so `[qcrb]\nderivative-step=1e-5` fills that subcommand's
  // option.  Values from the file never override explicit flags.
  app.set_config("--config", "",
                 "Read options from a key = value file with one [section] "
                 "per subcommand; flags override file values");
  app.allow_config_extras(CLI::config_extras_mode::error);

  int exit_code = 0;

  auto spectrum_opts = std::make_shared<SpectrumOpts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "spectrum", "Eigenvalue branches over a detuning grid");
    cmd->add_option("--gamma0", spectrum_opts->gamma0, "Balanced mode rate")
        ->capture_default_str();
    cmd->add_option("--Gamma", spectrum_opts->big_gamma,
                    "Dissipative coupling rate")
        ->capture_default_str();
    cmd->add_option("--delta-range", spectrum_opts->range,
                    "Detuning grid start:stop:count")
        ->capture_default_str();
    cmd->add_flag("--log", spectrum_opts->log_spacing, "Logarithmic spacing");
    cmd->add_option("--ep-tol", spectrum_opts->ep_tol,
                    "Coalescence tolerance (relative)")
        ->capture_default_str();
    attach_common(cmd, spectrum_opts->out);
    cmd->callback([spectrum_opts]() { run_spectrum(*spectrum_opts); });
  }

  auto phase_opts = std::make_shared<PhaseOpts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "phase", "Symmetry phase and eigenvalues at one parameter point");
    cmd->add_option("--gamma0", phase_opts->gamma0, "Balanced mode rate")
        ->capture_default_str();
    cmd->add_option("--Gamma", phase_opts->big_gamma,
                    "Dissipative coupling rate")
        ->capture_default_str();
    cmd->add_option("--delta", phase_opts->delta, "Mode detuning")
        ->required();
    cmd->add_option("--ep-tol", phase_opts->ep_tol,
                    "Coalescence tolerance (relative)")
        ->capture_default_str();
    attach_common(cmd, phase_opts->out);
    cmd->callback([phase_opts]() { run_phase(*phase_opts); });
  }

  auto critical_opts = std::make_shared<CriticalOpts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "critical", "Critical drive frequencies of the response");
    cmd->add_option("--gamma0", critical_opts->gamma0, "Balanced mode rate")
        ->required();
    cmd->add_option("--Gamma", critical_opts->big_gamma,
                    "Dissipative coupling rate")
        ->capture_default_str();
    cmd->add_option("--delta", critical_opts->delta, "Mode detuning")
        ->required();
    attach_common(cmd, critical_opts->out);
    cmd->callback([critical_opts]() { run_critical(*critical_opts); });
  }

  auto qcrb_opts = std::make_shared<QcrbOpts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "qcrb", "Fisher information and frequency-estimation bound sweep");
    CLI::Option* eps =
        cmd->add_option("--epsilon", qcrb_opts->epsilon,
                        "Detuning offset from coalescence, delta = "
                        "(2+epsilon)*Gamma, with gamma0 on the singular "
                        "branch for that side");
    CLI::Option* del =
        cmd->add_option("--delta", qcrb_opts->delta, "Mode detuning");
    CLI::Option* g0 =
        cmd->add_option("--gamma0", qcrb_opts->gamma0, "Balanced mode rate");
    eps->excludes(del)->excludes(g0);
    cmd->add_option("--Gamma", qcrb_opts->big_gamma,
                    "Dissipative coupling rate")
        ->capture_default_str();
    cmd->add_option("--gamma-c", qcrb_opts->gamma_c, "Probe coupling rate")
        ->capture_default_str();
    cmd->add_option("--gamma-bath", qcrb_opts->gamma_bath,
                    "Shared-channel noise rate (default: Gamma)");
    cmd->add_option("--mu-in", qcrb_opts->mu_in,
                    "Input quadrature means xa xb ya yb")
        ->expected(4);
    cmd->add_option("--covariance-mode", qcrb_opts->cov_mode,
                    "Input noise convention")
        ->check(CLI::IsMember({"symmetric", "as-written"}))
        ->capture_default_str();
    cmd->add_option("--derivative-step", qcrb_opts->derivative_step,
                    "Central-difference step (units of Gamma)")
        ->capture_default_str();
    cmd->add_option("--omega-range", qcrb_opts->range,
                    "Frequency grid start:stop:count (offsets from the "
                    "center)")
        ->required();
    cmd->add_flag("--log", qcrb_opts->log_spacing, "Logarithmic spacing");
    CLI::Option* cen = cmd->add_option("--center", qcrb_opts->center,
                                       "Offset origin of the grid")
                           ->capture_default_str();
    cmd->add_flag("--center-root", qcrb_opts->center_root,
                  "Center the grid on the smallest non-negative critical "
                  "frequency")
        ->excludes(cen);
    attach_common(cmd, qcrb_opts->out);
    cmd->callback([qcrb_opts, eps, del, g0]() {
      qcrb_opts->has_epsilon = eps->count() > 0;
      qcrb_opts->has_delta = del->count() > 0;
      qcrb_opts->has_gamma0 = g0->count() > 0;
      run_qcrb(*qcrb_opts);
    });
  }

  auto laurent_opts = std::make_shared<LaurentOpts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "laurent",
        "Leading pole coefficient: closed form against residue probes");
    cmd->add_option("--gamma0", laurent_opts->gamma0, "Balanced mode rate")
        ->required();
    cmd->add_option("--Gamma", laurent_opts->big_gamma,
                    "Dissipative coupling rate")
        ->capture_default_str();
    cmd->add_option("--delta", laurent_opts->delta, "Mode detuning")
        ->required();
    cmd->add_option("--radii", laurent_opts->radii,
                    "Probe radii, decreasing (units of Gamma)")
        ->expected(-1);
    attach_common(cmd, laurent_opts->out);
    cmd->callback([laurent_opts]() { run_laurent(*laurent_opts); });
  }

  auto pole_fit_opts = std::make_shared<PoleFitOpts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "pole-fit", "Log-log slope of a bound sweep near a singularity");
    cmd->add_option("--input", pole_fit_opts->input,
                    "Sweep CSV/JSON path ('-' for stdin)")
        ->capture_default_str();
    cmd->add_option("--omega0", pole_fit_opts->omega0,
                    "Singular frequency to measure distance from")
        ->required();
    cmd->add_option("--window", pole_fit_opts->window,
                    "Fit window lo:hi on |omega - omega0|")
        ->required();
    CLI::Option* step = cmd->add_option(
        "--derivative-step", pole_fit_opts->derivative_step,
        "Sweep derivative step, for the exclusion zone (units of Gamma)");
    CLI::Option* gam = cmd->add_option("--Gamma", pole_fit_opts->big_gamma,
                                       "Rate scale of the sweep");
    attach_common(cmd, pole_fit_opts->out);
    cmd->callback([pole_fit_opts, step, gam]() {
      pole_fit_opts->has_step = step->count() > 0;
      pole_fit_opts->has_gamma = gam->count() > 0;
      run_pole_fit(*pole_fit_opts);
    });
  }

  auto validate_opts = std::make_shared<ValidateOpts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "validate",
        "Cross-check dynamics routes and randomized model invariants");
    cmd->add_option("--preset", validate_opts->preset, "Scenario to run")
        ->check(CLI::IsMember({"lossy", "gain-ep", "decoupled", "all"}))
        ->capture_default_str();
    cmd->add_option("--t-final", validate_opts->t_final, "Evolution length")
        ->capture_default_str();
    cmd->add_option("--dt", validate_opts->dt, "Master-equation step")
        ->capture_default_str();
    cmd->add_option("--n-max", validate_opts->n_max, "Fock cutoff per mode")
        ->capture_default_str();
    cmd->add_option("--alpha", validate_opts->alpha,
                    "Initial coherent amplitude (both modes)")
        ->capture_default_str();
    attach_common(cmd, validate_opts->out);
    cmd->callback([validate_opts, &exit_code]() {
      exit_code = run_validate(*validate_opts);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const NotOnCriticalLocus& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const GainNotLindblad& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return exit_code;
}
