#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sgwp/types.hpp"

namespace sgwp {

/// (q <> p)_ij = q_j p_i - q_i p_j.
template <typename Scalar>
Matrix<Scalar> diamond(const Vector<Scalar>& q, const Vector<Scalar>& p) {
  if (q.size() != p.size()) throw std::invalid_argument("diamond: length mismatch");
  return p * q.transpose() - q * p.transpose();
}

/// J_hbar = q <> p - (hbar/2) [B^{-1}, A]. Antisymmetric.
template <typename Scalar>
Matrix<Scalar> semiclassical_angular_momentum(const PacketState<Scalar>& s, Scalar hbar) {
  const Matrix<Scalar> binv = s.B.inverse();
  return diamond(s.q, s.p) - hbar / Scalar(2) * (binv * s.A - s.A * binv);
}

/// d = 2: the scalar q1 p2 - q2 p1 (size-1 vector); d = 3: q x p.
template <typename Scalar>
Vector<Scalar> classical_angular_momentum(const PhasePoint<Scalar>& z) {
  const auto& q = z.q;
  const auto& p = z.p;
  if (z.dim() == 2) return Vector<Scalar>::Constant(1, q(0) * p(1) - q(1) * p(0));
  if (z.dim() == 3) {
    Vector<Scalar> l(3);
    l << q(1) * p(2) - q(2) * p(1), q(2) * p(0) - q(0) * p(2), q(0) * p(1) - q(1) * p(0);
    return l;
  }
  throw std::invalid_argument("angular momentum needs d = 2 or 3");
}

struct PowerLawFit {
  double intercept = 0.0;  ///< c in error ~ exp(c) * hbar^alpha
  double exponent = 0.0;   ///< alpha
};

/// Ordinary least squares of ln(error) against ln(hbar).
PowerLawFit loglog_fit(std::span<const std::pair<double, double>> pairs);

struct ConvergenceReport {
  std::vector<double> hbars;
  std::vector<std::size_t> samples;
  std::vector<double> classical_error;
  std::vector<double> semiclassical_error;
  std::vector<double> egorov_se;
  PowerLawFit classical_fit;
  PowerLawFit semiclassical_fit;
};

}  // namespace sgwp
