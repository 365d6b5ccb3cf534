#include "sgwp/app/commands.hpp"

#include <fstream>
#include <sstream>

#include "sgwp/app/checks.hpp"
#include "sgwp/app/csv.hpp"
#include "sgwp/dynamics.hpp"
#include "sgwp/packet.hpp"

namespace sgwp::app {
namespace {

std::vector<std::string> indexed(const std::string& prefix, int d) {
  std::vector<std::string> out;
  for (int i = 1; i <= d; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> matrix_names(const std::string& prefix, int d) {
  std::vector<std::string> out;
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) out.push_back(prefix + std::to_string(i) + std::to_string(j));
  return out;
}

void append(std::vector<std::string>& a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
}

void append(std::vector<double>& row, const Vec& v) {
  for (int i = 0; i < v.size(); ++i) row.push_back(v(i));
}

void append_row_major(std::vector<double>& row, const Mat& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
}

// Upper-triangle entries of J_hbar: J12 in 2D, J12, J13, J23 in 3D.
std::vector<std::string> j_names(int d) {
  std::vector<std::string> out;
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) out.push_back("J" + std::to_string(i) + std::to_string(j));
  return out;
}

template <typename StateT>
void write_trajectory(std::ostream& os, const std::vector<std::string>& header,
                      const Trajectory<StateT>& traj) {
  write_row(os, header);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row{traj.times[i]};
    append(row, traj.states[i].q);
    append(row, traj.states[i].p);
    if constexpr (std::is_same_v<StateT, State>) {
      append_row_major(row, traj.states[i].A);
      append_row_major(row, traj.states[i].B);
    }
    row.insert(row.end(), traj.monitors[i].begin(), traj.monitors[i].end());
    write_row(os, row);
  }
  if (traj.abort)
    os << "# aborted at step " << traj.abort->step << ": " << traj.abort->reason << '\n';
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return fallback;
  file.open(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
  return file;
}

}  // namespace

bool write_simulation(const RunConfig& cfg, std::ostream& os) {
  validate(cfg);
  const auto field = make_field(cfg);
  const auto& f = *field;
  const State s0 = initial_state(cfg);
  const int d = s0.dim();
  const double hbar = cfg.hbar;
  const double t_final = resolved_t_final(cfg);

  std::vector<std::string> header{"t"};
  append(header, indexed("q", d));
  append(header, indexed("p", d));

  if (cfg.model == "classical") {
    header.push_back("H0");
    if (d == 2) header.push_back("Lz_classical");
    MonitorSet<ClassicalPoint> mon{{}, [&f, d](const ClassicalPoint& z) {
                                     std::vector<double> v{classical_hamiltonian(z, f)};
                                     if (d == 2) v.push_back(classical_angular_momentum(z)(0));
                                     return v;
                                   }};
    auto traj = rk4_integrate([&f](const ClassicalPoint& z) { return classical_rhs(z, f); },
                              ClassicalPoint{s0.q, s0.p}, cfg.dt, t_final, mon);
    write_trajectory(os, header, traj);
    return traj.completed();
  }

  append(header, matrix_names("A", d));
  append(header, matrix_names("B", d));
  header.push_back("H0");
  header.push_back("Hhbar");
  append(header, j_names(d));
  header.push_back("minEigB");
  MonitorSet<State> mon{{}, [&f, hbar, d](const State& s) {
                          std::vector<double> v{classical_hamiltonian(ClassicalPoint{s.q, s.p}, f),
                                                semiclassical_hamiltonian(s, f, hbar)};
                          const Mat j = semiclassical_angular_momentum(s, hbar);
                          for (int a = 0; a < d; ++a)
                            for (int b = a + 1; b < d; ++b) v.push_back(j(a, b));
                          v.push_back(min_eigenvalue(s.B));
                          return v;
                        }};
  Trajectory<State> traj;
  if (cfg.model == "zhou")
    traj = rk4_integrate([&f](const State& s) { return zhou_rhs(s, f); }, s0, cfg.dt, t_final,
                         mon);
  else
    traj = rk4_integrate([&f, hbar](const State& s) { return semiclassical_rhs(s, f, hbar); }, s0,
                         cfg.dt, t_final, mon);
  write_trajectory(os, header, traj);
  return traj.completed();
}

EgorovEstimate write_egorov(const RunConfig& cfg, std::ostream& os) {
  validate(cfg);
  const auto field = make_field(cfg);
  const State s0 = initial_state(cfg);
  const int d = s0.dim();
  const auto observables =
      cfg.observables.empty() ? default_observables(d) : parse_observables(cfg.observables, d);
  const auto ensemble = wigner_sample(s0, cfg.hbar, cfg.seed, cfg.samples);
  const auto est = propagate_ensemble(ensemble, *field, cfg.dt, resolved_t_final(cfg),
                                      observables, EgorovOptions{cfg.workers});

  // Phase-space means first, then their standard errors, then (mean, se)
  // pairs for the remaining observables.
  std::vector<std::size_t> phase, other;
  for (std::size_t k = 0; k < observables.size(); ++k) {
    const auto kind = observables[k].kind;
    (kind == Observable::Kind::position || kind == Observable::Kind::momentum ? phase : other)
        .push_back(k);
  }
  std::vector<std::string> header{"t"};
  for (auto k : phase) header.push_back("mean_" + est.names[k]);
  for (auto k : phase) header.push_back("se_" + est.names[k]);
  for (auto k : other) {
    header.push_back("mean_" + est.names[k]);
    header.push_back("se_" + est.names[k]);
  }
  write_row(os, header);
  for (std::size_t t = 0; t < est.times.size(); ++t) {
    std::vector<double> row{est.times[t]};
    for (auto k : phase) row.push_back(est.mean[k][t]);
    for (auto k : phase) row.push_back(est.se[k][t]);
    for (auto k : other) {
      row.push_back(est.mean[k][t]);
      row.push_back(est.se[k][t]);
    }
    write_row(os, row);
  }
  os << "# excluded_samples=" << est.excluded << '\n';
  return est;
}

ConvergenceReport run_convergence(const RunConfig& cfg, std::ostream* log) {
  validate(cfg);
  const auto field = make_field(cfg);
  const auto& f = *field;
  const State s0 = initial_state(cfg);
  const int d = s0.dim();
  const double t_star = resolved_t_star(cfg);

  std::vector<Observable> phase_obs;
  for (int i = 0; i < d; ++i) phase_obs.push_back({Observable::Kind::position, i});
  for (int i = 0; i < d; ++i) phase_obs.push_back({Observable::Kind::momentum, i});

  const auto classical = rk4_integrate(
      [&f](const ClassicalPoint& z) { return classical_rhs(z, f); }, ClassicalPoint{s0.q, s0.p},
      cfg.dt, t_star);
  if (!classical.completed())
    throw std::runtime_error("classical trajectory aborted: " + classical.abort->reason);

  ConvergenceReport report;
  for (std::size_t i = 0; i < cfg.hbars.size(); ++i) {
    const double hbar = cfg.hbars[i];
    const std::size_t n = hbar <= cfg.small_hbar ? cfg.samples_small_hbar : cfg.samples;
    const auto semi = rk4_integrate(
        [&f, hbar](const State& s) { return semiclassical_rhs(s, f, hbar); }, s0, cfg.dt, t_star);
    if (!semi.completed())
      throw std::runtime_error("semiclassical trajectory aborted: " + semi.abort->reason);
    const auto est =
        propagate_ensemble(wigner_sample(s0, hbar, cfg.seed + i, n), f, cfg.dt, t_star,
                           phase_obs, EgorovOptions{cfg.workers});
    if (est.excluded > 0)
      throw std::runtime_error("Egorov ensemble excluded " + std::to_string(est.excluded) +
                               " diverging samples");
    const std::size_t t = est.time_index(t_star);
    double se2 = 0.0;
    for (std::size_t k = 0; k < phase_obs.size(); ++k) se2 += est.se[k][t] * est.se[k][t];

    report.hbars.push_back(hbar);
    report.samples.push_back(n);
    report.classical_error.push_back(phase_error(classical, est, t_star));
    report.semiclassical_error.push_back(phase_error(semi, est, t_star));
    report.egorov_se.push_back(std::sqrt(se2));
    if (log)
      *log << "hbar=" << hbar << " N=" << n << " classical=" << report.classical_error.back()
           << " semiclassical=" << report.semiclassical_error.back()
           << " se=" << report.egorov_se.back() << std::endl;
  }
  std::vector<std::pair<double, double>> cl, sc;
  for (std::size_t i = 0; i < report.hbars.size(); ++i) {
    cl.emplace_back(report.hbars[i], report.classical_error[i]);
    sc.emplace_back(report.hbars[i], report.semiclassical_error[i]);
  }
  report.classical_fit = loglog_fit(cl);
  report.semiclassical_fit = loglog_fit(sc);
  return report;
}

void write_convergence(const ConvergenceReport& r, std::ostream& os) {
  const std::vector<std::string> header{"hbar", "samples", "error_classical",
                                        "error_semiclassical", "egorov_se"};
  write_row(os, header);
  for (std::size_t i = 0; i < r.hbars.size(); ++i) {
    const std::vector<std::string> row{
        format_double(r.hbars[i]), std::to_string(r.samples[i]),
        format_double(r.classical_error[i]), format_double(r.semiclassical_error[i]),
        format_double(r.egorov_se[i])};
    write_row(os, row);
  }
  os << "# fit classical: intercept=" << format_double(r.classical_fit.intercept)
     << " exponent=" << format_double(r.classical_fit.exponent) << '\n';
  os << "# fit semiclassical: intercept=" << format_double(r.semiclassical_fit.intercept)
     << " exponent=" << format_double(r.semiclassical_fit.exponent) << '\n';
}

std::string convergence_plot_script(const ConvergenceReport& r, const std::string& csv_path) {
  std::ostringstream os;
  os << "# gnuplot script for " << csv_path << "\n"
     << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set key top left\n"
     << "set xlabel 'hbar'\n"
     << "set ylabel 'phase-space error'\n"
     << "fc(x) = exp(" << format_double(r.classical_fit.intercept) << ") * x**("
     << format_double(r.classical_fit.exponent) << ")\n"
     << "fs(x) = exp(" << format_double(r.semiclassical_fit.intercept) << ") * x**("
     << format_double(r.semiclassical_fit.exponent) << ")\n"
     << "plot '" << csv_path << "' every ::1 using 1:3 with points pt 7 title 'classical', \\\n"
     << "     '" << csv_path << "' every ::1 using 1:4 with points pt 5 title 'semiclassical', \\\n"
     << "     '" << csv_path << "' every ::1 using 1:5 with linespoints dt 2 title 'Egorov SE', \\\n"
     << "     fc(x) title 'classical fit', fs(x) title 'semiclassical fit'\n";
  return os.str();
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::ofstream file;
    if (cfg.command == "check") {
      bool ok = true;
      for (const auto& r : run_checks()) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << '\n';
        ok = ok && r.passed;
      }
      out << (ok ? "all checks passed" : "some checks FAILED") << '\n';
      return ok ? 0 : 1;
    }
    std::ostream& os = open_output(cfg.out, file, out);
    if (cfg.command == "simulate") {
      if (!write_simulation(cfg, os)) {
        err << "integration aborted; partial trajectory written\n";
        return 2;
      }
      return 0;
    }
    if (cfg.command == "egorov") {
      const auto est = write_egorov(cfg, os);
      if (est.excluded > 0) err << est.excluded << " samples excluded (non-finite)\n";
      return 0;
    }
    if (cfg.command == "converge") {
      const auto report = run_convergence(cfg, &err);
      write_convergence(report, os);
      if (cfg.out != "-" && !cfg.out.empty()) {
        std::ofstream script(cfg.out + ".gp");
        script << convergence_plot_script(report, cfg.out);
      }
      err << "classical fit:     exp(" << format_double(report.classical_fit.intercept)
          << ") * hbar^" << format_double(report.classical_fit.exponent) << "\n"
          << "semiclassical fit: exp(" << format_double(report.semiclassical_fit.intercept)
          << ") * hbar^" << format_double(report.semiclassical_fit.exponent) << "\n";
      return 0;
    }
    err << "unknown command '" << cfg.command << "'\n";
    return 64;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sgwp::app
