#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "sgwp/types.hpp"

namespace sgwp {

namespace detail {

template <typename Scalar>
Scalar max_asymmetry(const Matrix<Scalar>& m) {
  if (m.size() == 0) return Scalar(0);
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

template <typename Scalar>
void check_square(const Matrix<Scalar>& m, int d, const char* label) {
  if (m.rows() != d || m.cols() != d) {
    std::ostringstream os;
    os << label << " must be " << d << "x" << d << ", got " << m.rows() << "x"
       << m.cols();
    throw std::invalid_argument(os.str());
  }
}

}  // namespace detail

/// Smallest eigenvalue of a symmetric matrix.
template <typename Scalar>
Scalar min_eigenvalue(const Matrix<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

template <typename Scalar>
bool is_positive_definite(const Matrix<Scalar>& m) {
  Eigen::LLT<Matrix<Scalar>> llt(m);
  return llt.info() == Eigen::Success;
}

/// Throws InvalidStateError naming the smallest eigenvalue if `b` is not
/// positive definite.
template <typename Scalar>
void require_positive_definite(const Matrix<Scalar>& b, const char* label = "B") {
  if (is_positive_definite(b)) return;
  std::ostringstream os;
  os << label << " is not positive definite (smallest eigenvalue "
     << min_eigenvalue(b) << ")";
  throw InvalidStateError(os.str());
}

/// Validates and returns a packet state. Width matrices that are asymmetric
/// below kSymmetryTolerance are symmetrised; anything worse is rejected.
template <typename Scalar>
PacketState<Scalar> make_packet_state(Vector<Scalar> q, Vector<Scalar> p, Matrix<Scalar> a,
                                      Matrix<Scalar> b) {
  const int d = static_cast<int>(q.size());
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("dimension must be between 1 and " +
                                std::to_string(kMaxDim));
  if (p.size() != d) throw std::invalid_argument("p must have the same length as q");
  detail::check_square(a, d, "A");
  detail::check_square(b, d, "B");
  if (!q.allFinite() || !p.allFinite() || !a.allFinite() || !b.allFinite())
    throw InvalidStateError("packet state has non-finite entries");
  for (auto* m : {&a, &b}) {
    const Scalar asym = detail::max_asymmetry(*m);
    if (asym > Scalar(kSymmetryTolerance)) {
      std::ostringstream os;
      os << (m == &a ? "A" : "B") << " is not symmetric (max |M - M^T| = " << asym << ")";
      throw InvalidStateError(os.str());
    }
    *m = ((*m + m->transpose()) / Scalar(2)).eval();
  }
  require_positive_definite(b);
  return PacketState<Scalar>{std::move(q), std::move(p), std::move(a), std::move(b)};
}

/// Squared L2 norm of the unnormalised Gaussian.
template <typename Scalar>
Scalar packet_norm_squared(const Matrix<Scalar>& b, Scalar delta, Scalar hbar) {
  using std::exp;
  using std::pow;
  using std::sqrt;
  const auto d = static_cast<Scalar>(b.rows());
  return sqrt(pow(std::numbers::pi_v<Scalar> * hbar, d) / b.determinant()) *
         exp(Scalar(-2) * delta / hbar);
}

/// The norm parameter that puts the packet on the unit-norm level set.
template <typename Scalar>
Scalar normalization_delta(const Matrix<Scalar>& b, Scalar hbar) {
  using std::log;
  const auto d = static_cast<Scalar>(b.rows());
  return hbar / Scalar(4) *
         (d * log(std::numbers::pi_v<Scalar> * hbar) - log(b.determinant()));
}

template <typename Scalar>
std::complex<Scalar> evaluate_packet(const WavePacket<Scalar>& wp, Scalar hbar,
                                     const Vector<Scalar>& x) {
  const auto& s = wp.state;
  const Vector<Scalar> y = x - s.q;
  const Scalar re = Scalar(0.5) * y.dot(s.A * y) + s.p.dot(y) + wp.phi;
  const Scalar im = Scalar(0.5) * y.dot(s.B * y) + wp.delta;
  // exp((i/hbar)(re + i im)) = exp(-im/hbar) * exp(i re/hbar)
  return std::polar(std::exp(-im / hbar), re / hbar);
}

/// Position covariance (hbar/2) B^{-1} of the normalised packet.
template <typename Scalar>
Matrix<Scalar> position_covariance(const PacketState<Scalar>& s, Scalar hbar) {
  return (hbar / Scalar(2)) * s.B.inverse();
}

}  // namespace sgwp
