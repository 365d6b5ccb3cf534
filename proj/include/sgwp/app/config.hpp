#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgwp/field_model.hpp"
#include "sgwp/types.hpp"

namespace sgwp::app {

/// Everything a command needs. Matrices are row-major flat lists.
struct RunConfig {
  std::string command;
  std::string model = "semiclassical";  // classical | zhou | semiclassical
  std::string potential = "cosine1d";   // cosine1d | quartic2d | quadratic | free

  // quadratic / free potential parameters
  int dim = 0;  // 0: inferred from the potential or from q
  double mass = 1.0;
  std::vector<double> k_mat;
  std::vector<double> b_vec;
  double c = 0.0;
  std::vector<double> m0_mat;
  std::vector<double> a0_vec;

  // initial packet; empty means the potential's reference initial data
  std::vector<double> q, p, a_mat, b_mat;

  double hbar = 0.1;
  std::vector<double> hbars{0.5, 0.3, 0.1, 0.05, 0.03, 0.01};
  double dt = 0.01;
  double t_final = -1.0;  // negative: reference horizon of the potential
  double t_star = -1.0;   // negative: reference probe time of the potential
  std::size_t samples = 1'000'000;
  std::size_t samples_small_hbar = 10'000'000;
  double small_hbar = 0.01;  // hbar <= this uses samples_small_hbar in converge
  std::uint64_t seed = 1;
  int gh_nodes = 20;
  std::string observables;
  unsigned workers = 0;
  std::string out = "-";
};

/// Parses argv (including argv[0]). Flags override `--config` file values;
/// unknown flags or config keys throw std::invalid_argument. Returns an empty
/// command when only help was requested (help text in `help`).
RunConfig parse_command_line(const std::vector<std::string>& args, std::string* help = nullptr);

/// Dimension implied by the configuration.
int resolve_dim(const RunConfig& cfg);

/// Field model named by cfg.potential; throws listing the valid names.
FieldPtr<double> make_field(const RunConfig& cfg);

/// Initial packet (explicit values, or the reference data of the potential).
State initial_state(const RunConfig& cfg);

/// Horizon and probe time with the per-potential defaults applied
/// (cosine1d: 3 and 1.6, quartic2d: 10 and 2, otherwise 3 and 1.6).
double resolved_t_final(const RunConfig& cfg);
double resolved_t_star(const RunConfig& cfg);

/// Checks every value against the target modules' preconditions.
void validate(const RunConfig& cfg);

}  // namespace sgwp::app
