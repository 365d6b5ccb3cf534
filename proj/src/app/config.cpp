#include "sgwp/app/config.hpp"

#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "sgwp/packet.hpp"

namespace sgwp::app {
namespace {

Mat to_matrix(const std::vector<double>& v, int d, const char* label) {
  if (static_cast<int>(v.size()) != d * d) {
    std::ostringstream os;
    os << label << " needs " << d * d << " comma-separated entries (row-major " << d << "x" << d
       << "), got " << v.size();
    throw std::invalid_argument(os.str());
  }
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = v[i * d + j];
  return m;
}

Vec to_vector(const std::vector<double>& v, int d, const char* label) {
  if (static_cast<int>(v.size()) != d) {
    std::ostringstream os;
    os << label << " needs " << d << " entries, got " << v.size();
    throw std::invalid_argument(os.str());
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), d);
}

const char* kPotentials = "cosine1d, quartic2d, quadratic, free";

}  // namespace

RunConfig parse_command_line(const std::vector<std::string>& args, std::string* help) {
  RunConfig cfg;
  CLI::App app{"Semiclassical Gaussian wave packets in electromagnetic potentials", "sgwp"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--model", cfg.model, "classical | zhou | semiclassical")
      ->check(CLI::IsMember({"classical", "zhou", "semiclassical"}));
  app.add_option("--potential", cfg.potential, kPotentials);
  app.add_option("--dim", cfg.dim, "dimension for quadratic/free potentials");
  app.add_option("--mass", cfg.mass, "particle mass (quadratic/free)");
  app.add_option("--K", cfg.k_mat, "quadratic: Hessian of V (row-major)")->delimiter(',');
  app.add_option("--b", cfg.b_vec, "quadratic: linear coefficient of V")->delimiter(',');
  app.add_option("--c", cfg.c, "quadratic: constant of V");
  app.add_option("--M0", cfg.m0_mat, "quadratic: A(x) = M0 x + a0 (row-major)")->delimiter(',');
  app.add_option("--a0", cfg.a0_vec, "quadratic: constant part of A")->delimiter(',');
  app.add_option("--q", cfg.q, "initial position")->delimiter(',');
  app.add_option("--p", cfg.p, "initial momentum")->delimiter(',');
  app.add_option("--A", cfg.a_mat, "initial real width matrix (row-major)")->delimiter(',');
  app.add_option("--B", cfg.b_mat, "initial imaginary width matrix (row-major)")->delimiter(',');
  app.add_option("--hbar", cfg.hbar, "semiclassical parameter");
  app.add_option("--hbars", cfg.hbars, "hbar list for converge")->delimiter(',');
  app.add_option("--dt", cfg.dt, "time step");
  app.add_option("--t-final,--t_final", cfg.t_final, "integration horizon");
  app.add_option("--t-star,--t_star", cfg.t_star, "probe time for converge");
  app.add_option("--samples", cfg.samples, "Egorov sample count");
  app.add_option("--samples-small-hbar,--samples_small_hbar", cfg.samples_small_hbar,
                 "converge: sample count for hbar <= --small-hbar");
  app.add_option("--small-hbar,--small_hbar", cfg.small_hbar,
                 "converge: threshold for --samples-small-hbar");
  app.add_option("--seed", cfg.seed, "RNG seed");
  app.add_option("--gh-nodes,--gh_nodes", cfg.gh_nodes, "Gauss-Hermite nodes per dimension");
  // Config files split list values on commas, so collect a list and join it.
  std::vector<std::string> observables;
  app.add_option("--observables", observables, "Egorov observables, e.g. q1,p1,H0,Lz")
      ->delimiter(',');
  app.add_option("--workers", cfg.workers, "Egorov worker threads (0 = all cores)");
  app.add_option("--out", cfg.out, "output path ('-' for stdout)");

  app.add_subcommand("simulate", "integrate one trajectory and write CSV");
  app.add_subcommand("egorov", "Egorov/IVR ensemble expectation values as CSV");
  app.add_subcommand("converge", "error-vs-hbar sweep with power-law fits");
  app.add_subcommand("check", "run the fast invariant suite");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    if (help) *help = app.help();
    return RunConfig{};
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }
  for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  for (const auto& name : observables)
    cfg.observables += (cfg.observables.empty() ? "" : ",") + name;
  return cfg;
}

int resolve_dim(const RunConfig& cfg) {
  if (cfg.potential == "cosine1d") return 1;
  if (cfg.potential == "quartic2d") return 2;
  if (cfg.dim > 0) return cfg.dim;
  if (!cfg.q.empty()) return static_cast<int>(cfg.q.size());
  if (!cfg.b_vec.empty()) return static_cast<int>(cfg.b_vec.size());
  return 1;
}

FieldPtr<double> make_field(const RunConfig& cfg) {
  const int d = resolve_dim(cfg);
  if (cfg.potential == "cosine1d") return cosine_1d();
  if (cfg.potential == "quartic2d") return quartic_rotational_2d();
  if (cfg.potential == "free") return free_particle(d, cfg.mass);
  if (cfg.potential == "quadratic") {
    auto or_zero_mat = [&](const std::vector<double>& v, const char* label) {
      return v.empty() ? Mat(Mat::Zero(d, d)) : to_matrix(v, d, label);
    };
    auto or_zero_vec = [&](const std::vector<double>& v, const char* label) {
      return v.empty() ? Vec(Vec::Zero(d)) : to_vector(v, d, label);
    };
    return quadratic_linear(or_zero_mat(cfg.k_mat, "K"), or_zero_vec(cfg.b_vec, "b"), cfg.c,
                            or_zero_mat(cfg.m0_mat, "M0"), or_zero_vec(cfg.a0_vec, "a0"),
                            cfg.mass);
  }
  throw std::invalid_argument("unknown potential '" + cfg.potential + "' (available: " +
                              kPotentials + ")");
}

State initial_state(const RunConfig& cfg) {
  const int d = resolve_dim(cfg);
  Vec q = Vec::Zero(d), p = Vec::Zero(d);
  Mat a = Mat::Zero(d, d), b = Mat::Identity(d, d);
  if (cfg.potential == "cosine1d") {
    q(0) = 0.5;
    p(0) = -1.0;
  } else if (cfg.potential == "quartic2d") {
    q << 1.0, 0.0;
    p << 0.0, 1.0;
    a << -3.0, -6.0, -6.0, -6.0;
    b << 1.0, 0.5, 0.5, 1.0;
  }
  if (!cfg.q.empty()) q = to_vector(cfg.q, d, "q");
  if (!cfg.p.empty()) p = to_vector(cfg.p, d, "p");
  if (!cfg.a_mat.empty()) a = to_matrix(cfg.a_mat, d, "A");
  if (!cfg.b_mat.empty()) b = to_matrix(cfg.b_mat, d, "B");
  return make_packet_state<double>(q, p, a, b);
}

double resolved_t_final(const RunConfig& cfg) {
  if (cfg.t_final >= 0) return cfg.t_final;
  return cfg.potential == "quartic2d" ? 10.0 : 3.0;
}

double resolved_t_star(const RunConfig& cfg) {
  if (cfg.t_star >= 0) return cfg.t_star;
  return cfg.potential == "quartic2d" ? 2.0 : 1.6;
}

void validate(const RunConfig& cfg) {
  if (cfg.dim < 0 || cfg.dim > kMaxDim)
    throw std::invalid_argument("dim must be between 1 and " + std::to_string(kMaxDim));
  const int d = resolve_dim(cfg);
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("dimension must be between 1 and " + std::to_string(kMaxDim));
  if (cfg.model != "classical" && cfg.model != "zhou" && cfg.model != "semiclassical")
    throw std::invalid_argument("unknown model '" + cfg.model +
                                "' (available: classical, zhou, semiclassical)");
  make_field(cfg);
  initial_state(cfg);
  SimConfig{cfg.hbar, cfg.dt, resolved_t_final(cfg), d}.validate();
  if (cfg.samples < 1 || cfg.samples_small_hbar < 1)
    throw std::invalid_argument("sample counts must be at least 1");
  if (cfg.gh_nodes < 1) throw std::invalid_argument("gh_nodes must be at least 1");
  for (double h : cfg.hbars)
    if (!(h > 0)) throw std::invalid_argument("every hbar in --hbars must be positive");
  if (cfg.command == "converge" && cfg.hbars.size() < 2)
    throw std::invalid_argument("converge needs at least two values in --hbars");
}

}  // namespace sgwp::app
