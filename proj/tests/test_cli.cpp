#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sgwp/app/checks.hpp"
#include "sgwp/app/commands.hpp"
#include "sgwp/app/config.hpp"
#include "sgwp/app/csv.hpp"
#include "sgwp/dynamics.hpp"

using namespace sgwp;
using namespace sgwp::app;

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string field; std::getline(ss, field, sep);) out.push_back(field);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "sgwp");
  return parse_command_line(args);
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path;
}

std::string simulate(const RunConfig& cfg) {
  std::ostringstream os;
  REQUIRE(write_simulation(cfg, os));
  return os.str();
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("command-line parsing") {
  const auto cfg = parse({"simulate", "--potential", "quartic2d", "--hbar", "0.05", "--q", "1,2",
                          "--A", "1,0,0,1", "--t-final", "2.5", "--seed", "9"});
  CHECK(cfg.command == "simulate");
  CHECK(cfg.potential == "quartic2d");
  CHECK(cfg.hbar == 0.05);
  CHECK(cfg.q == std::vector<double>{1, 2});
  CHECK(cfg.a_mat == std::vector<double>{1, 0, 0, 1});
  CHECK(cfg.t_final == 2.5);
  CHECK(cfg.seed == 9);
  CHECK(cfg.dt == 0.01);

  // Global options may also precede the command.
  CHECK(parse({"--hbar", "0.2", "egorov"}).hbar == 0.2);
  CHECK(parse({"converge", "--hbars", "0.5,0.1"}).hbars == std::vector<double>{0.5, 0.1});

  CHECK_THROWS_AS(parse({"simulate", "--no-such-flag", "1"}), std::invalid_argument);
  CHECK_THROWS_AS(parse({"simulate", "--model", "quantum"}), std::invalid_argument);
  CHECK_THROWS_AS(parse({}), std::invalid_argument);

  std::string help;
  const auto h = parse_command_line({"sgwp", "--help"}, &help);
  CHECK(h.command.empty());
  CHECK(help.find("--t-final") != std::string::npos);
}

TEST_CASE("config files: flags take precedence and unknown keys are errors") {
  const auto path = temp_file("sgwp_test_config.ini",
                              "hbar = 0.25\nseed = 4\npotential = quartic2d\nt_final = 1.5\n"
                              "samples = 1000\n");
  const auto cfg = parse({"egorov", "--config", path.string(), "--seed", "12"});
  CHECK(cfg.hbar == 0.25);
  CHECK(cfg.seed == 12);
  CHECK(cfg.potential == "quartic2d");
  CHECK(cfg.t_final == 1.5);
  CHECK(cfg.samples == 1000);

  const auto bad = temp_file("sgwp_test_bad.ini", "hbar = 0.25\nhbarr = 0.1\n");
  CHECK_THROWS_AS(parse({"simulate", "--config", bad.string()}), std::invalid_argument);
  std::filesystem::remove(path);
  std::filesystem::remove(bad);
}

TEST_CASE("every flag has a config-file key") {
  const auto path = temp_file(
      "sgwp_test_all.ini",
      "model = zhou\npotential = quadratic\ndim = 2\nmass = 2\nK = 1,0,0,1\nb = 0,1\nc = 3\n"
      "M0 = 0,-1,1,0\na0 = 1,1\nq = 1,0\np = 0,1\nA = 0,0,0,0\nB = 2,0,0,2\nhbar = 0.3\n"
      "hbars = 0.4,0.2\ndt = 0.02\nt-final = 4\nt-star = 1\nsamples = 10\n"
      "samples-small-hbar = 20\nsmall-hbar = 0.2\nseed = 5\ngh-nodes = 8\n"
      "observables = q1,H0\nworkers = 2\nout = x.csv\n");
  const auto cfg = parse({"simulate", "--config", path.string()});
  CHECK(cfg.model == "zhou");
  CHECK(cfg.dim == 2);
  CHECK(cfg.mass == 2);
  CHECK(cfg.k_mat.size() == 4);
  CHECK(cfg.c == 3);
  CHECK(cfg.m0_mat == std::vector<double>{0, -1, 1, 0});
  CHECK(cfg.a0_vec.size() == 2);
  CHECK(cfg.b_mat == std::vector<double>{2, 0, 0, 2});
  CHECK(cfg.hbars.size() == 2);
  CHECK(cfg.dt == 0.02);
  CHECK(cfg.t_final == 4);
  CHECK(cfg.t_star == 1);
  CHECK(cfg.samples_small_hbar == 20);
  CHECK(cfg.small_hbar == 0.2);
  CHECK(cfg.gh_nodes == 8);
  CHECK(cfg.observables == "q1,H0");
  CHECK(cfg.workers == 2);
  CHECK(cfg.out == "x.csv");
  CHECK_NOTHROW(validate(cfg));
  std::filesystem::remove(path);
}

TEST_CASE("validation and model construction") {
  RunConfig cfg;
  cfg.potential = "nonsense";
  try {
    make_field(cfg);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("quartic2d") != std::string::npos);
  }
  cfg = {};
  cfg.model = "quantum";
  CHECK_THROWS(validate(cfg));
  cfg = {};
  cfg.b_mat = {1, 2, 2, 1};
  cfg.potential = "quartic2d";
  CHECK_THROWS_AS(validate(cfg), InvalidStateError);
  cfg = {};
  cfg.q = {1, 2};
  CHECK_THROWS(validate(cfg));
  cfg = {};
  cfg.hbar = -0.1;
  CHECK_THROWS(validate(cfg));
  cfg = {};
  cfg.command = "converge";
  cfg.hbars = {0.1};
  CHECK_THROWS(validate(cfg));

  cfg = {};
  cfg.potential = "quartic2d";
  const State s = initial_state(cfg);
  CHECK(s.A(0, 1) == -6.0);
  CHECK(s.B(0, 1) == 0.5);
  CHECK(resolved_t_final(cfg) == 10.0);
  CHECK(resolved_t_star(cfg) == 2.0);
  cfg.potential = "cosine1d";
  CHECK(resolved_t_final(cfg) == 3.0);
  CHECK(resolved_t_star(cfg) == 1.6);
}

TEST_CASE("CSV formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.5) == "-0.5");
  std::ostringstream os;
  const std::vector<std::string> fields{"a", "b,c", "say \"hi\""};
  write_row(os, fields);
  CHECK(os.str() == "a,\"b,c\",\"say \"\"hi\"\"\"\n");
  // Round trip at full precision.
  for (double v : {std::acos(-1.0), 1.0 / 3.0, 6.02214076e23})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("simulate: 1D reference run") {
  RunConfig cfg;
  cfg.command = "simulate";
  cfg.t_final = 3.0;
  const auto lines = lines_of(simulate(cfg));
  REQUIRE(lines.size() == 302);
  const auto header = split(lines[0]);
  CHECK(header == std::vector<std::string>{"t", "q1", "p1", "A11", "B11", "H0", "Hhbar",
                                           "minEigB"});
  const std::size_t hc = column(header, "Hhbar");
  const double h0 = std::stod(split(lines[1])[hc]);
  for (std::size_t i = 1; i < lines.size(); ++i)
    CHECK(std::abs(std::stod(split(lines[i])[hc]) - h0) / h0 < 1e-7);
  CHECK(split(lines.back())[0] == "3");
}

TEST_CASE("simulate: 2D header carries the angular momentum") {
  RunConfig cfg;
  cfg.command = "simulate";
  cfg.potential = "quartic2d";
  cfg.t_final = 0.0;
  const auto lines = lines_of(simulate(cfg));
  REQUIRE(lines.size() == 2);
  const auto header = split(lines[0]);
  CHECK(header == std::vector<std::string>{"t", "q1", "q2", "p1", "p2", "A11", "A12", "A21",
                                           "A22", "B11", "B12", "B21", "B22", "H0", "Hhbar",
                                           "J12", "minEigB"});
  const auto row = split(lines[1]);
  CHECK(std::stod(row[column(header, "J12")]) == doctest::Approx(-1.1));
  CHECK(std::stod(row[column(header, "A12")]) == -6.0);

  cfg.model = "classical";
  const auto classical = lines_of(simulate(cfg));
  CHECK(split(classical[0]) ==
        std::vector<std::string>{"t", "q1", "q2", "p1", "p2", "H0", "Lz_classical"});
  CHECK(split(classical[1])[6] == "1");
}

TEST_CASE("simulate: Zhou and classical runs share the centre trajectory") {
  for (const std::string potential : {"cosine1d", "quartic2d"}) {
    RunConfig cfg;
    cfg.command = "simulate";
    cfg.potential = potential;
    cfg.t_final = 3.0;
    cfg.model = "classical";
    const auto a = lines_of(simulate(cfg));
    cfg.model = "zhou";
    const auto b = lines_of(simulate(cfg));
    REQUIRE(a.size() == b.size());
    const int d = potential == "cosine1d" ? 1 : 2;
    for (std::size_t i = 1; i < a.size(); ++i) {
      const auto ra = split(a[i]), rb = split(b[i]);
      for (int k = 0; k <= 2 * d; ++k) CHECK(std::abs(std::stod(ra[k]) - std::stod(rb[k])) <= 1e-12);
    }
  }
}

TEST_CASE("simulate: an aborted run keeps the prefix and reports the step") {
  // RK4 is unstable for omega * dt = 10; the state overflows after a few dozen steps.
  RunConfig cfg;
  cfg.command = "simulate";
  cfg.model = "classical";
  cfg.potential = "quadratic";
  cfg.k_mat = {100};
  cfg.q = {1};
  cfg.p = {0};
  cfg.dt = 1.0;
  cfg.t_final = 500.0;
  std::ostringstream out, err;
  CHECK(run_command(cfg, out, err) == 2);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() > 3);
  CHECK(lines.back().rfind("# aborted at step", 0) == 0);
  CHECK(lines.back().find("non-finite") != std::string::npos);
  CHECK(lines.size() < 500);

  cfg.dt = 0.0;
  std::ostringstream out2, err2;
  CHECK(run_command(cfg, out2, err2) == 1);
  CHECK(err2.str().find("dt") != std::string::npos);
}

TEST_CASE("egorov: CSV layout and determinism") {
  RunConfig cfg;
  cfg.command = "egorov";
  cfg.potential = "quartic2d";
  cfg.samples = 3000;
  cfg.t_final = 0.2;
  cfg.workers = 1;
  std::ostringstream a;
  write_egorov(cfg, a);
  cfg.workers = 3;
  std::ostringstream b;
  write_egorov(cfg, b);
  CHECK(a.str() == b.str());

  const auto lines = lines_of(a.str());
  CHECK(split(lines[0]) == std::vector<std::string>{"t", "mean_q1", "mean_q2", "mean_p1",
                                                    "mean_p2", "se_q1", "se_q2", "se_p1", "se_p2",
                                                    "mean_H0", "se_H0", "mean_Lz", "se_Lz"});
  CHECK(lines.size() == 1 + 21 + 1);
  CHECK(lines.back() == "# excluded_samples=0");
  const auto row0 = split(lines[1]);
  // t = 0 means sit on (q0, p0) within 4 SE.
  const double q0[] = {1, 0, 0, 1};
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(std::stod(row0[1 + k]) - q0[k]) <= 4 * std::stod(row0[5 + k]));

  cfg.seed = 2;
  std::ostringstream c;
  write_egorov(cfg, c);
  CHECK(c.str() != a.str());
}

TEST_CASE("egorov: harmonic sanity through the command layer") {
  RunConfig cfg;
  cfg.command = "egorov";
  cfg.potential = "quadratic";
  cfg.k_mat = {1};
  cfg.q = {1};
  cfg.p = {0};
  cfg.samples = 20000;
  cfg.t_final = 3.0;
  cfg.dt = 0.05;
  cfg.observables = "q1";
  std::ostringstream os;
  write_egorov(cfg, os);
  const auto lines = lines_of(os.str());
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const auto r = split(lines[i]);
    CHECK(std::abs(std::stod(r[1]) - std::cos(std::stod(r[0]))) <= 4 * std::stod(r[2]));
  }
}

TEST_CASE("converge: exact regime leaves only Monte Carlo noise") {
  RunConfig cfg;
  cfg.command = "converge";
  cfg.potential = "quadratic";
  cfg.k_mat = {1.5};
  cfg.m0_mat = {0.0};
  cfg.a0_vec = {0.3};
  cfg.q = {0.5};
  cfg.p = {-1};
  cfg.hbars = {0.5, 0.1, 0.02};
  cfg.samples = 20000;
  cfg.samples_small_hbar = 20000;
  cfg.t_star = 1.0;
  const auto report = run_convergence(cfg);
  REQUIRE(report.hbars.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(report.semiclassical_error[i] <= 4 * report.egorov_se[i]);

  std::ostringstream os;
  write_convergence(report, os);
  const auto lines = lines_of(os.str());
  CHECK(lines[0] == "hbar,samples,error_classical,error_semiclassical,egorov_se");
  CHECK(lines.size() == 1 + 3 + 2);
  CHECK(lines[4].rfind("# fit classical:", 0) == 0);
  const auto script = convergence_plot_script(report, "conv.csv");
  CHECK(script.find("'conv.csv'") != std::string::npos);
  CHECK(script.find("set logscale xy") != std::string::npos);
}

TEST_CASE("check: the suite passes and catches injected faults") {
  for (const auto& r : run_checks()) CHECK_MESSAGE(r.passed, r.name << ": " << r.detail);

  CheckHooks sign_error;
  sign_error.semiclassical = [](const State& s, const FieldModel<double>& f, double hbar) {
    // Flip the sign of the hbar correction in qdot.
    State r = semiclassical_rhs(s, f, hbar);
    const State r0 = semiclassical_rhs(s, f, 0.0);
    r.q = 2 * r0.q - r.q;
    return r;
  };
  bool bracket_failed = false;
  for (const auto& r : run_checks(sign_error))
    if (r.name == "bracket_consistency") bracket_failed = !r.passed;
  CHECK(bracket_failed);

  CheckHooks tilted;
  Vec tilt(2);
  tilt << 1, 0;
  tilted.noether_model = std::make_shared<TiltedField<double>>(quartic_rotational_2d(), tilt);
  bool noether_failed = false;
  for (const auto& r : run_checks(tilted))
    if (r.name == "angular_momentum_conservation_2d") noether_failed = !r.passed;
  CHECK(noether_failed);
}

TEST_CASE("run_command exit codes") {
  RunConfig cfg;
  cfg.command = "check";
  std::ostringstream out, err;
  CHECK(run_command(cfg, out, err) == 0);
  CHECK(out.str().find("all checks passed") != std::string::npos);

  cfg.command = "simulate";
  cfg.potential = "nowhere";
  CHECK(run_command(cfg, out, err) == 1);
  CHECK(err.str().find("available") != std::string::npos);
}
