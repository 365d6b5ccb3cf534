#include "sgwp/dynamics.hpp"

namespace sgwp {
namespace {

// Symmetric part of the full-entry gradient of g at m, where g is only ever
// evaluated on symmetric arguments.
Mat symmetric_gradient(const std::function<double(const Mat&)>& g, const Mat& m, double h) {
  const int d = static_cast<int>(m.rows());
  Mat grad(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      Mat dir = Mat::Zero(d, d);
      dir(i, j) = 1.0;
      dir(j, i) = 1.0;
      const double slope = (g(m + h * dir) - g(m - h * dir)) / (2 * h);
      grad(i, j) = (i == j) ? slope : slope / 2;
      grad(j, i) = grad(i, j);
    }
  }
  return grad;
}

}  // namespace

PacketState<double> bracket_rhs(const std::function<double(const State&)>& hamiltonian,
                                const State& s, double hbar, double h) {
  if (hbar == 0.0) throw std::invalid_argument("bracket_rhs: hbar = 0 makes the bracket singular");
  if (!(h > 0)) throw std::invalid_argument("bracket_rhs: fd_step must be positive");
  const int d = s.dim();
  PacketState<double> out;
  out.q.resize(d);
  out.p.resize(d);
  for (int i = 0; i < d; ++i) {
    State sp = s, sm = s;
    sp.p(i) += h;
    sm.p(i) -= h;
    out.q(i) = (hamiltonian(sp) - hamiltonian(sm)) / (2 * h);
    sp = s;
    sm = s;
    sp.q(i) += h;
    sm.q(i) -= h;
    out.p(i) = -(hamiltonian(sp) - hamiltonian(sm)) / (2 * h);
  }

  const Mat dh_da = symmetric_gradient(
      [&](const Mat& a) {
        State t = s;
        t.A = a;
        return hamiltonian(t);
      },
      s.A, h);
  const Mat binv = s.B.inverse();
  const Mat dh_dc = symmetric_gradient(
      [&](const Mat& c) {
        State t = s;
        const Mat b = c.inverse();
        t.B = (b + b.transpose()) / 2;
        return hamiltonian(t);
      },
      binv, h);

  out.A = -(4.0 / hbar) * dh_dc;
  const Mat cdot = (4.0 / hbar) * dh_da;
  out.B = -s.B * cdot * s.B;
  out.B = ((out.B + out.B.transpose()) / 2).eval();
  return out;
}

}  // namespace sgwp
