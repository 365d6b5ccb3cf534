#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgwp/dynamics.hpp"
#include "sgwp/field_model.hpp"
#include "sgwp/types.hpp"

namespace sgwp {

struct PhaseSample {
  Vec x;
  Vec xi;
};

/// N phase-space points distributed according to the Wigner function of the
/// normalised packet `state0`:
///   x ~ N(q, (hbar/2) B^{-1}),  xi = p + A (x - q) + eta,  eta ~ N(0, (hbar/2) B).
/// Sample i is a pure function of (seed, i, state0, hbar); nothing is stored.
class PhaseEnsemble {
 public:
  PhaseEnsemble(State state0, double hbar, std::uint64_t seed, std::size_t count);

  std::size_t size() const { return count_; }
  std::uint64_t seed() const { return seed_; }
  double hbar() const { return hbar_; }
  const State& initial_state() const { return state0_; }

  PhaseSample sample(std::size_t i) const;
  std::vector<PhaseSample> materialize() const;

 private:
  State state0_;
  double hbar_;
  std::uint64_t seed_;
  std::size_t count_;
  Mat x_factor_;    // lower Cholesky factor of (hbar/2) B^{-1}
  Mat eta_factor_;  // lower Cholesky factor of (hbar/2) B
};

PhaseEnsemble wigner_sample(const State& state0, double hbar, std::uint64_t seed,
                            std::size_t count);

/// Phase-space observable evaluated on classical points.
struct Observable {
  enum class Kind { position, momentum, energy, angular_momentum };
  Kind kind;
  int component = 0;

  std::string name() const;
  double evaluate(const ClassicalPoint& z, const FieldModel<double>& model) const;
};

/// q1..qd, p1..pd, H0 and, for d = 2, Lz.
std::vector<Observable> default_observables(int dim);
/// Parses a comma-separated list such as "q1,p2,H0,Lz".
std::vector<Observable> parse_observables(std::string_view list, int dim);

struct EgorovEstimate {
  std::vector<double> times;
  std::vector<std::string> names;
  /// mean[k][t] and se[k][t] for observable k at times[t].
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> se;
  std::size_t used = 0;
  std::size_t excluded = 0;

  /// Index of the observable called `name`; throws std::out_of_range.
  std::size_t index_of(std::string_view name) const;
  /// Index of the output time equal to `t`; throws std::out_of_range.
  std::size_t time_index(double t) const;
};

struct EgorovOptions {
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
};

/// Advances every ensemble member under the classical flow (RK4, step dt) and
/// reports per-time means and standard errors (stddev / sqrt(N)). Members that
/// become non-finite are excluded from all times and counted. Results are
/// bitwise independent of the worker count.
EgorovEstimate propagate_ensemble(const PhaseEnsemble& ensemble, const FieldModel<double>& model,
                                  double dt, double t_final,
                                  std::span<const Observable> observables,
                                  const EgorovOptions& options = {});

/// Euclidean distance in phase space between (q, p) and the ensemble means at
/// t_star.
double phase_error(const Vec& q, const Vec& p, const EgorovEstimate& estimate, double t_star);

template <typename StateT>
double phase_error(const Trajectory<StateT>& traj, const EgorovEstimate& estimate,
                   double t_star) {
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (std::abs(traj.times[i] - t_star) <= 1e-9 * std::max(1.0, std::abs(t_star)))
      return phase_error(traj.states[i].q, traj.states[i].p, estimate, t_star);
  }
  throw std::out_of_range("phase_error: t_star is not on the trajectory time grid");
}

}  // namespace sgwp
