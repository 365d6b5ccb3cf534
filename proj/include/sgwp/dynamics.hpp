#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sgwp/field_model.hpp"
#include "sgwp/packet.hpp"
#include "sgwp/types.hpp"

namespace sgwp {

// ---------------------------------------------------------------------------
// Hamiltonians

/// H0 = |p - A(q)|^2 / 2m + V(q).
template <typename Scalar>
Scalar classical_hamiltonian(const PhasePoint<Scalar>& z, const FieldModel<Scalar>& f) {
  return (z.p - f.a(z.q)).squaredNorm() / (Scalar(2) * f.mass()) + f.v(z.q);
}

/// V, A and |A|^2 with their O(hbar) width corrections
/// f + (hbar/4) Tr(B^{-1} D^2 f).
template <typename Scalar>
struct CorrectedPotentials {
  Scalar v;
  Vector<Scalar> a;
  Scalar asq;
};

template <typename Scalar>
CorrectedPotentials<Scalar> corrected_potentials(const PacketState<Scalar>& s,
                                                 const FieldModel<Scalar>& f, Scalar hbar) {
  const Matrix<Scalar> binv = s.B.inverse();
  const Scalar c = hbar / Scalar(4);
  CorrectedPotentials<Scalar> out;
  out.v = f.v(s.q) + c * binv.cwiseProduct(f.hess_v(s.q)).sum();
  out.a = f.a(s.q);
  for (int k = 0; k < s.dim(); ++k) out.a(k) += c * binv.cwiseProduct(f.hess_a(s.q, k)).sum();
  out.asq = asq(f, s.q) + c * binv.cwiseProduct(hess_asq(f, s.q)).sum();
  return out;
}

/// Semiclassical Hamiltonian H_hbar: H0 plus the O(hbar) width terms.
template <typename Scalar>
Scalar semiclassical_hamiltonian(const PacketState<Scalar>& s, const FieldModel<Scalar>& f,
                                 Scalar hbar) {
  const Scalar m = f.mass();
  const auto& q = s.q;
  const Matrix<Scalar> binv = s.B.inverse();
  const Matrix<Scalar> jac = f.jac_a(q);
  Matrix<Scalar> hess_ap = Matrix<Scalar>::Zero(s.dim(), s.dim());
  for (int k = 0; k < s.dim(); ++k) hess_ap += s.p(k) * f.hess_a(q, k);
  const Matrix<Scalar> inner = s.A * s.A + s.B * s.B - jac.transpose() * s.A -
                               s.A * jac - hess_ap + Scalar(0.5) * hess_asq(f, q);
  return classical_hamiltonian(PhasePoint<Scalar>{q, s.p}, f) +
         hbar / (Scalar(4) * m) * (binv * inner).trace() +
         hbar / Scalar(4) * (binv * f.hess_v(q)).trace();
}

// ---------------------------------------------------------------------------
// Vector fields

template <typename Scalar>
PhasePoint<Scalar> classical_rhs(const PhasePoint<Scalar>& z, const FieldModel<Scalar>& f) {
  const Scalar m = f.mass();
  const Vector<Scalar> av = f.a(z.q);
  const Matrix<Scalar> jac = f.jac_a(z.q);
  // -(1/2m) grad(|A|^2 - 2 A.p) - grad V
  return {(z.p - av) / m, -(jac.transpose() * (av - z.p)) / m - f.grad_v(z.q)};
}

namespace detail {

// Width-matrix rates shared by the Zhou and semiclassical systems; they carry
// no hbar corrections.
template <typename Scalar>
void width_rates(const PacketState<Scalar>& s, const FieldModel<Scalar>& f,
                 PacketState<Scalar>& out) {
  const Scalar m = f.mass();
  const auto& q = s.q;
  const int d = s.dim();
  const Matrix<Scalar> jac = f.jac_a(q);
  Matrix<Scalar> hess_ap = Matrix<Scalar>::Zero(d, d);
  for (int k = 0; k < d; ++k) hess_ap += s.p(k) * f.hess_a(q, k);

  Matrix<Scalar> adot = -(s.A * s.A - s.B * s.B) / m +
                        (jac.transpose() * s.A + s.A * jac + hess_ap -
                         Scalar(0.5) * hess_asq(f, q)) /
                            m -
                        f.hess_v(q);
  Matrix<Scalar> bdot = -(s.A * s.B + s.B * s.A) / m + (jac.transpose() * s.B + s.B * jac) / m;
  // Both expressions are symmetric in exact arithmetic.
  out.A = (adot + adot.transpose()) / Scalar(2);
  out.B = (bdot + bdot.transpose()) / Scalar(2);
}

}  // namespace detail

/// Parameter equations that are exact for linear A and quadratic V. The
/// (q, p) block is the classical flow.
template <typename Scalar>
PacketState<Scalar> zhou_rhs(const PacketState<Scalar>& s, const FieldModel<Scalar>& f) {
  PacketState<Scalar> out;
  auto z = classical_rhs(PhasePoint<Scalar>{s.q, s.p}, f);
  out.q = std::move(z.q);
  out.p = std::move(z.p);
  detail::width_rates(s, f, out);
  return out;
}

/// Hamiltonian vector field of H_hbar with respect to the reduced symplectic
/// form dq ^ dp + (hbar/4) dB^{-1} ^ dA.
template <typename Scalar>
PacketState<Scalar> semiclassical_rhs(const PacketState<Scalar>& s, const FieldModel<Scalar>& f,
                                      Scalar hbar) {
  const Scalar m = f.mass();
  const int d = s.dim();
  const auto& q = s.q;
  const Matrix<Scalar> binv = s.B.inverse();
  const Scalar c = hbar / Scalar(4);
  const Vector<Scalar> av = f.a(q);
  const Matrix<Scalar> jac = f.jac_a(q);
  const Matrix<Scalar> binv_a = binv * s.A;

  PacketState<Scalar> out;
  out.q.resize(d);
  Vector<Scalar> grad_ap = jac.transpose() * s.p;  // d_i (A . p)
  for (int k = 0; k < d; ++k) {
    const Matrix<Scalar> hk = f.hess_a(q, k);
    out.q(k) = (s.p(k) - av(k) - c * binv.cwiseProduct(hk).sum()) / m;
    // d_i Tr(B^{-1} D^2 A_k) p_k
    grad_ap += c * s.p(k) * f.grad_hess_trace_a(q, binv, k);
  }
  const Vector<Scalar> grad_asq_h = grad_asq(f, q) + c * grad_hess_trace_asq(f, q, binv);
  const Vector<Scalar> grad_v_h = f.grad_v(q) + c * f.grad_hess_trace_v(q, binv);
  out.p = -(grad_asq_h - Scalar(2) * grad_ap) / (Scalar(2) * m) - grad_v_h;
  // -d_q of -(hbar/2m) Tr(B^{-1} A DA): (hbar/2m) sum_jk (B^{-1}A)_jk d_i d_j A_k
  for (int k = 0; k < d; ++k)
    out.p += (Scalar(2) * c / m) * (f.hess_a(q, k) * binv_a.col(k));
  detail::width_rates(s, f, out);
  return out;
}

/// Numerical Hamiltonian vector field of an arbitrary H under the reduced
/// bracket, by central differences:
///   qdot = dH/dp, pdot = -dH/dq,
///   Adot = -(4/hbar) dH/dC, Cdot = (4/hbar) dH/dA with C = B^{-1},
///   Bdot = -B Cdot B.
/// Matrix gradients are the symmetric parts of the full-entry gradients,
/// obtained from perturbations along symmetric directions E_ij + E_ji.
PacketState<double> bracket_rhs(const std::function<double(const State&)>& hamiltonian,
                                const State& s, double hbar, double fd_step = 1e-5);

// ---------------------------------------------------------------------------
// Integration

struct IntegrationAbort {
  std::size_t step = 0;
  std::string reason;
};

template <typename StateT>
struct Trajectory {
  std::vector<double> times;
  std::vector<StateT> states;
  std::vector<std::string> monitor_names;
  /// monitors[i] holds the monitor values at times[i].
  std::vector<std::vector<double>> monitors;
  std::optional<IntegrationAbort> abort;

  bool completed() const { return !abort.has_value(); }
};

template <typename StateT>
struct MonitorSet {
  std::vector<std::string> names;
  std::function<std::vector<double>(const StateT&)> evaluate;
};

/// Returns a description of why `s` is not an admissible integration state.
inline std::optional<std::string> state_defect(const State& s) {
  if (!all_finite(s)) return "non-finite state";
  if (!is_positive_definite(s.B)) return "B lost positive definiteness";
  return std::nullopt;
}
inline std::optional<std::string> state_defect(const ClassicalPoint& z) {
  if (!all_finite(z)) return "non-finite state";
  return std::nullopt;
}

/// One classic fourth-order Runge-Kutta step.
template <typename StateT, typename Rhs>
StateT rk4_step(const Rhs& rhs, const StateT& y, double dt) {
  const StateT k1 = rhs(y);
  const StateT k2 = rhs(y + (0.5 * dt) * k1);
  const StateT k3 = rhs(y + (0.5 * dt) * k2);
  const StateT k4 = rhs(y + dt * k3);
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Output times 0, dt, 2 dt, ... up to t_final. When t_final is not a whole
/// number of steps (to within 1e-9 of a step) a final shorter step lands on it.
struct TimeGrid {
  double dt = 0.0;
  std::size_t full_steps = 0;
  double last_step = 0.0;  ///< 0 when t_final is a multiple of dt

  TimeGrid(double step, double t_final) : dt(step) {
    if (!(step > 0) || !std::isfinite(step)) throw std::invalid_argument("dt must be positive");
    if (!(t_final >= 0) || !std::isfinite(t_final))
      throw std::invalid_argument("t_final must be non-negative");
    const double ratio = t_final / step;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9) {
      full_steps = static_cast<std::size_t>(nearest);
    } else {
      full_steps = static_cast<std::size_t>(std::floor(ratio));
      last_step = t_final - static_cast<double>(full_steps) * step;
    }
  }

  std::size_t steps() const { return full_steps + (last_step > 0 ? 1 : 0); }
  /// Size of step i (1-based).
  double step(std::size_t i) const { return i <= full_steps ? dt : last_step; }
  double time(std::size_t i) const {
    return i <= full_steps ? static_cast<double>(i) * dt
                           : static_cast<double>(full_steps) * dt + last_step;
  }
};

/// Fixed-step RK4 from t = 0 to t_final. Monitors are evaluated at every
/// stored state. Integration stops, keeping the partial trajectory, as soon as
/// a state fails state_defect().
template <typename StateT, typename Rhs>
Trajectory<StateT> rk4_integrate(const Rhs& rhs, const StateT& initial, double dt,
                                 double t_final, const MonitorSet<StateT>& monitors = {}) {
  const TimeGrid grid(dt, t_final);
  const std::size_t n = grid.steps();
  Trajectory<StateT> traj;
  traj.monitor_names = monitors.names;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  auto record = [&](std::size_t i, const StateT& y) {
    traj.times.push_back(grid.time(i));
    traj.states.push_back(y);
    if (monitors.evaluate) traj.monitors.push_back(monitors.evaluate(y));
  };
  if (auto defect = state_defect(initial)) {
    traj.abort = IntegrationAbort{0, *defect};
    return traj;
  }
  record(0, initial);
  StateT y = initial;
  for (std::size_t i = 1; i <= n; ++i) {
    y = rk4_step(rhs, y, grid.step(i));
    if (auto defect = state_defect(y)) {
      traj.abort = IntegrationAbort{i, *defect};
      break;
    }
    record(i, y);
  }
  return traj;
}

}  // namespace sgwp
