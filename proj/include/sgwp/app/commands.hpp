#pragma once

#include <ostream>
#include <string>

#include "sgwp/app/config.hpp"
#include "sgwp/egorov.hpp"
#include "sgwp/observables.hpp"

namespace sgwp::app {

/// Trajectory CSV for cfg.model. Returns false if the integration aborted
/// (the partial trajectory and a '# aborted' comment are still written).
bool write_simulation(const RunConfig& cfg, std::ostream& os);

/// Ensemble expectation CSV; the last line is '# excluded_samples=K'.
EgorovEstimate write_egorov(const RunConfig& cfg, std::ostream& os);

/// Runs the hbar sweep of cmd converge.
ConvergenceReport run_convergence(const RunConfig& cfg, std::ostream* log = nullptr);
void write_convergence(const ConvergenceReport& report, std::ostream& os);
/// gnuplot script plotting the convergence CSV at `csv_path` on log-log axes.
std::string convergence_plot_script(const ConvergenceReport& report, const std::string& csv_path);

/// Dispatches cfg.command; returns the process exit code.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace sgwp::app
