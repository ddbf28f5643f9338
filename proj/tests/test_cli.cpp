// End-to-end tests of the installed command-line tool: table schemas,
// determinism, serialisation formats, exit codes and stream plumbing.

#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <aptsense/laurent.hpp>
#include <aptsense/metrology.hpp>
#include <aptsense/params.hpp>

#include "io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("aptsense-cli-tests-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return {std::istreambuf_iterator<char>(in),
          std::istreambuf_iterator<char>()};
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

int shell(const std::string& command) {
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

CliResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string("'") + APTSENSE_CLI_PATH + "' " + args +
                          " >'" + out.string() + "' 2>'" + err.string() + "'";
  CliResult r;
  r.exit_code = shell(cmd);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double to_double(const std::string& field) {
  return std::strtod(field.c_str(), nullptr);
}

}  // namespace

TEST_CASE("spectrum emits the documented eigenvalue table") {
  const CliResult r = run_cli("spectrum");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() == 402);  // header + 401 grid rows
  CHECK(lines[0] ==
        "delta,re_lambda_plus,re_lambda_minus,im_lambda_plus,"
        "im_lambda_minus");

  int coalesced_hits = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = split_csv(lines[i]);
    REQUIRE(f.size() == 5);
    const double delta = to_double(f[0]);
    if (delta == -2.0 || delta == 2.0) {
      // The default grid lands exactly on the coalescence detunings and
      // the real branches must agree to the last printed digit there.
      CHECK(f[1] == f[2]);
      ++coalesced_hits;
    }
  }
  CHECK(coalesced_hits == 2);

  const std::vector<std::string> last = split_csv(lines.back());
  CHECK(to_double(last[0]) == 4.0);
  CHECK(std::abs(to_double(last[1]) - std::sqrt(3.0)) <= 1e-12);
  CHECK(std::abs(to_double(last[2]) + std::sqrt(3.0)) <= 1e-12);
  CHECK(std::abs(to_double(last[3]) + 2.0) <= 1e-12);
  CHECK(std::abs(to_double(last[4]) + 2.0) <= 1e-12);
}

TEST_CASE("phase labels the coalescence point and its neighbours") {
  const CliResult ep = run_cli("phase --delta 2");
  REQUIRE(ep.exit_code == 0);
  const std::vector<std::string> f =
      split_csv(split_lines(ep.out).at(1));
  REQUIRE(f.size() == 9);
  CHECK(to_double(f[0]) == 2.0);
  CHECK(f[3] == "ExceptionalPoint");
  CHECK(to_double(f[8]) <= 1e-14);

  CHECK(split_csv(split_lines(run_cli("phase --delta 0").out).at(1))[3] ==
        "Unbroken");
  CHECK(split_csv(split_lines(run_cli("phase --delta 5").out).at(1))[3] ==
        "Broken");
}

TEST_CASE("critical lists each real root with its response determinant") {
  const CliResult r = run_cli("critical --gamma0 -1 --delta 4");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() == 3);  // header + two roots
  const std::vector<std::string> row1 = split_csv(lines[1]);
  const std::vector<std::string> row2 = split_csv(lines[2]);
  CHECK(row1[0] == "BrokenDetuned");
  CHECK(row2[0] == "BrokenDetuned");
  CHECK(std::abs(to_double(row1[1]) - 3.0) <= 1e-12);  // omega^2 branches
  CHECK(std::abs(to_double(row1[3]) - 3.0) <= 1e-12);
  CHECK(std::abs(to_double(row1[5]) + std::sqrt(3.0)) <= 1e-12);  // ascending
  CHECK(std::abs(to_double(row2[5]) - std::sqrt(3.0)) <= 1e-12);
  CHECK(to_double(row1[6]) <= 1e-8);
  CHECK(to_double(row2[6]) <= 1e-8);

  // A strictly lossy system has no real root; the row says so explicitly.
  const CliResult none = run_cli("critical --gamma0 1 --delta 1");
  REQUIRE(none.exit_code == 0);
  const std::vector<std::string> nrow =
      split_csv(split_lines(none.out).at(1));
  CHECK(nrow[0] == "NoRealRoot");
  CHECK(nrow[5] == "nan");
  CHECK(nrow[6] == "nan");
}

TEST_CASE("laurent reports the coalesced-pole residue table") {
  const CliResult r = run_cli("laurent --gamma0 -1 --delta 2");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() == 17);  // header + 16 matrix entries
  CHECK(split_csv(lines[0])[0] == "case");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = split_csv(lines[i]);
    REQUIRE(f.size() == 8);
    CHECK(f[0] == "ExceptionalPoint");
    CHECK(to_double(f[1]) == 0.0);  // expansion point
    CHECK(f[2] == "2");             // double pole
    CHECK(to_double(f[7]) <= 1e-3);
  }
  // Entry (0,1) of the leading coefficient is the coupling rate itself.
  const std::vector<std::string> entry01 = split_csv(lines[2]);
  CHECK(entry01[3] == "0");
  CHECK(entry01[4] == "1");
  CHECK(to_double(entry01[5]) == 1.0);
}

TEST_CASE("qcrb runs are deterministic") {
  const fs::path a = work_dir() / "det_a.csv";
  const fs::path b = work_dir() / "det_b.csv";
  const std::string args =
      "qcrb --epsilon 0 --omega-range 1e-4:1e-2:40 --log -o ";
  REQUIRE(run_cli(args + "'" + a.string() + "'").exit_code == 0);
  REQUIRE(run_cli(args + "'" + b.string() + "'").exit_code == 0);
  const std::string ca = slurp(a), cb = slurp(b);
  REQUIRE(!ca.empty());
  CHECK(ca == cb);
}

TEST_CASE("the bound sweep round-trips through the fit tool bit for bit") {
  const fs::path sweep_path = work_dir() / "roundtrip_sweep.csv";
  const fs::path fit_path = work_dir() / "roundtrip_fit.csv";
  REQUIRE(run_cli("qcrb --epsilon 0 --omega-range 1e-4:1e-1:200 --log -o '" +
                  sweep_path.string() + "'")
              .exit_code == 0);
  REQUIRE(run_cli("pole-fit --input '" + sweep_path.string() +
                  "' --omega0 0 --window 1e-4:1e-2 -o '" +
                  fit_path.string() + "'")
              .exit_code == 0);

  // Rebuild the identical sweep in process and fit it directly.
  aptsense::SystemParams p;
  p.delta = 2.0;
  p.big_gamma = 1.0;
  p.gamma0 = -1.0;
  p.gamma_c = 0.5;
  p.gamma_bath = 1.0;
  const std::vector<double> omegas = aptsense::cli::expand_grid(
      aptsense::cli::parse_grid("1e-4:1e-1:200"), true);
  const aptsense::QcrbSweep sweep =
      aptsense::qcrb_sweep(p, omegas, aptsense::ProbeConfig{});
  const aptsense::PoleFit fit = aptsense::pole_order_fit(
      sweep, 0.0, aptsense::cli::parse_window("1e-4:1e-2"));

  const std::vector<std::string> lines = split_lines(slurp(fit_path));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] ==
        "m_estimate,intercept,r_squared,window_lo,window_hi,n_rows");
  const std::vector<std::string> f = split_csv(lines[1]);
  // The CSV layer prints 17 significant digits, so parsing it back must
  // reproduce the in-process doubles exactly.
  CHECK(f[0] == aptsense::cli::format_double(fit.m_estimate));
  CHECK(f[2] == aptsense::cli::format_double(fit.r_squared));
  CHECK(f[5] == std::to_string(fit.n_rows));
  CHECK(std::abs(fit.m_estimate - 2.0) <= 0.05);
  CHECK(fit.r_squared >= 0.999);
}

TEST_CASE("singular rows serialise as JSON nulls") {
  const fs::path path = work_dir() / "singular.json";
  REQUIRE(run_cli("qcrb --epsilon 0 --omega-range=-1e-3:1e-3:3 "
                  "--format json -o '" +
                  path.string() + "'")
              .exit_code == 0);
  const json j = json::parse(slurp(path));
  CHECK(j["columns"] ==
        json::array({"omega", "qfi", "qcrb", "singular"}));
  CHECK(j["params"]["delta"] == 2.0);
  CHECK(j["params"]["gamma0"] == -1.0);
  CHECK(j["probe"]["covariance_mode"] == "symmetric");
  CHECK(j["probe"]["mu_in"] == json::array({2.0, 2.0, 0.0, 0.0}));
  CHECK(j["grid"]["spacing"] == "linear");
  REQUIRE(j["rows"].size() == 3);

  const json& mid = j["rows"][1];
  CHECK(mid[0] == 0.0);        // the grid midpoint hits the pole exactly
  CHECK(mid[1].is_null());     // diverging information serialises as null
  CHECK(mid[2] == 0.0);
  CHECK(mid[3] == 1);
  for (int k : {0, 2}) {
    CHECK(j["rows"][k][1].is_number());
    CHECK(j["rows"][k][1] > 0.0);
    CHECK(j["rows"][k][3] == 0);
  }
}

TEST_CASE("an options file fills in defaults without overriding flags") {
  const fs::path cfg = work_dir() / "probe.ini";
  {
    std::ofstream out(cfg);
    out << "[qcrb]\n";
    out << "derivative-step=1e-5\n";
    out << "gamma-c=0.25\n";
  }
  const fs::path path = work_dir() / "configured.json";
  REQUIRE(run_cli("qcrb --config '" + cfg.string() +
                  "' --epsilon 0.1 --gamma-c 0.5 "
                  "--omega-range 1e-3:1e-2:5 --log --format json -o '" +
                  path.string() + "'")
              .exit_code == 0);
  const json j = json::parse(slurp(path));
  CHECK(j["probe"]["derivative_step"] == 1e-5);  // from the options file
  CHECK(j["params"]["gamma_c"] == 0.5);          // flag wins over the file

  // A misspelled key is a loud parse error, never a silent no-op.
  const fs::path bad = work_dir() / "probe_bad.ini";
  {
    std::ofstream out(bad);
    out << "[qcrb]\n";
    out << "derivative-stepp=1e-5\n";
  }
  const CliResult r = run_cli("qcrb --config '" + bad.string() +
                              "' --epsilon 0.1 --omega-range 1e-3:1e-2:5");
  CHECK(r.exit_code == 2);
}

TEST_CASE("parse failures exit 2 without touching the output path") {
  const fs::path never = work_dir() / "never_written_2.csv";

  SUBCASE("mutually exclusive parameterisations") {
    const CliResult r =
        run_cli("qcrb --epsilon 0 --delta 1 --gamma0 -1 "
                "--omega-range 1e-3:1e-2:5 -o '" +
                never.string() + "'");
    CHECK(r.exit_code == 2);
    CHECK_FALSE(fs::exists(never));
    CHECK(!r.err.empty());
  }

  SUBCASE("unknown flag") {
    CHECK(run_cli("spectrum --bogus").exit_code == 2);
  }

  SUBCASE("incomplete manual parameterisation") {
    const CliResult r = run_cli("qcrb --delta 1 --omega-range 1e-3:1e-2:5 -o '" +
                                never.string() + "'");
    CHECK(r.exit_code == 2);
    CHECK_FALSE(fs::exists(never));
    CHECK(r.err.find("error:") != std::string::npos);
  }

  SUBCASE("malformed grid") {
    const CliResult r = run_cli("spectrum --delta-range oops");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
  }
}

TEST_CASE("domain failures exit 3 without touching the output path") {
  const fs::path never = work_dir() / "never_written_3.csv";

  SUBCASE("expansion point off the singular set") {
    const CliResult r =
        run_cli("laurent --gamma0 1 --delta 0 -o '" + never.string() + "'");
    CHECK(r.exit_code == 3);
    CHECK_FALSE(fs::exists(never));
    CHECK(r.err.find("error:") != std::string::npos);
  }

  SUBCASE("root-centred grid on a rootless response") {
    const CliResult r =
        run_cli("qcrb --delta 1 --gamma0 1 --omega-range 1e-3:1e-2:5 "
                "--center-root -o '" +
                never.string() + "'");
    CHECK(r.exit_code == 3);
    CHECK_FALSE(fs::exists(never));
    CHECK(r.err.find("error:") != std::string::npos);
  }
}

TEST_CASE("self-validation passes on the lossy preset") {
  const CliResult r = run_cli("validate --preset lossy");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS,lossy/mean-vs-propagator") != std::string::npos);
  CHECK(r.out.find("PASS,lossy/lindblad-vs-mean") != std::string::npos);
  CHECK(r.out.find("PASS,lossy/trace-preservation") != std::string::npos);
  CHECK(r.out.find("PASS,invariants/anti-pt-residual") != std::string::npos);
  CHECK(r.out.find("PASS,invariants/covariance-psd") != std::string::npos);
}

TEST_CASE("sweeps pipe through standard streams") {
  const std::string exe = std::string("'") + APTSENSE_CLI_PATH + "'";
  const fs::path file_fit = work_dir() / "file_fit.csv";
  const fs::path pipe_fit = work_dir() / "pipe_fit.csv";
  const fs::path sweep_path = work_dir() / "pipe_sweep.csv";

  REQUIRE(run_cli("qcrb --epsilon 0 --omega-range 1e-4:1e-1:120 --log -o '" +
                  sweep_path.string() + "'")
              .exit_code == 0);
  REQUIRE(run_cli("pole-fit --input '" + sweep_path.string() +
                  "' --omega0 0 --window 1e-4:1e-2 -o '" +
                  file_fit.string() + "'")
              .exit_code == 0);

  const std::string pipeline =
      exe + " qcrb --epsilon 0 --omega-range 1e-4:1e-1:120 --log -o - | " +
      exe + " pole-fit --input - --omega0 0 --window 1e-4:1e-2 -o '" +
      pipe_fit.string() + "' >/dev/null 2>&1";
  REQUIRE(shell(pipeline) == 0);

  const std::string direct = slurp(file_fit);
  REQUIRE(!direct.empty());
  CHECK(slurp(pipe_fit) == direct);
}

TEST_CASE("pole-fit treats CSV and metadata-bearing JSON inputs alike") {
  const fs::path sweep_csv = work_dir() / "alike_sweep.csv";
  const fs::path sweep_json = work_dir() / "alike_sweep.json";
  const fs::path fit_csv = work_dir() / "alike_fit_from_csv.csv";
  const fs::path fit_json = work_dir() / "alike_fit_from_json.csv";

  const std::string sweep_args =
      "qcrb --epsilon 0 --omega-range 1e-4:1e-1:120 --log ";
  REQUIRE(run_cli(sweep_args + "-o '" + sweep_csv.string() + "'")
              .exit_code == 0);
  REQUIRE(run_cli(sweep_args + "--format json -o '" + sweep_json.string() +
                  "'")
              .exit_code == 0);

  const std::string fit_args = " --omega0 0 --window 1e-4:1e-2 -o ";
  REQUIRE(run_cli("pole-fit --input '" + sweep_csv.string() + "'" + fit_args +
                  "'" + fit_csv.string() + "'")
              .exit_code == 0);
  REQUIRE(run_cli("pole-fit --input '" + sweep_json.string() + "'" +
                  fit_args + "'" + fit_json.string() + "'")
              .exit_code == 0);

  const std::string from_csv = slurp(fit_csv);
  REQUIRE(!from_csv.empty());
  CHECK(slurp(fit_json) == from_csv);
}
