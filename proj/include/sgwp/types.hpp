#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sgwp {

/// Largest configuration-space dimension supported. Vectors and matrices are
/// dynamically sized up to this bound and live on the stack.
inline constexpr int kMaxDim = 3;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                             kMaxDim, kMaxDim>;

using Vec = Vector<double>;
using Mat = Matrix<double>;

/// Raised when a packet leaves the admissible set (asymmetric widths or a
/// width matrix that is not positive definite).
class InvalidStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSymmetryTolerance = 1e-12;

/// Point (q, p, A, B) of the reduced parameter manifold. A is the real part
/// of the complex width matrix, B its (positive definite) imaginary part.
/// The same type doubles as a tangent vector for the integrators.
template <typename Scalar>
struct PacketState {
  Vector<Scalar> q;
  Vector<Scalar> p;
  Matrix<Scalar> A;
  Matrix<Scalar> B;

  int dim() const { return static_cast<int>(q.size()); }

  PacketState& operator+=(const PacketState& o) {
    q += o.q;
    p += o.p;
    A += o.A;
    B += o.B;
    return *this;
  }
  PacketState& operator*=(Scalar s) {
    q *= s;
    p *= s;
    A *= s;
    B *= s;
    return *this;
  }
};

template <typename Scalar>
PacketState<Scalar> operator+(PacketState<Scalar> a, const PacketState<Scalar>& b) {
  return a += b;
}
template <typename Scalar>
PacketState<Scalar> operator-(PacketState<Scalar> a, const PacketState<Scalar>& b) {
  a.q -= b.q;
  a.p -= b.p;
  a.A -= b.A;
  a.B -= b.B;
  return a;
}
template <typename Scalar>
PacketState<Scalar> operator*(Scalar s, PacketState<Scalar> a) {
  return a *= s;
}

/// Full ansatz parameters including phase and norm.
template <typename Scalar>
struct WavePacket {
  PacketState<Scalar> state;
  Scalar phi{0};
  Scalar delta{0};
};

/// Classical phase-space point (q, p).
template <typename Scalar>
struct PhasePoint {
  Vector<Scalar> q;
  Vector<Scalar> p;

  int dim() const { return static_cast<int>(q.size()); }

  PhasePoint& operator+=(const PhasePoint& o) {
    q += o.q;
    p += o.p;
    return *this;
  }
  PhasePoint& operator*=(Scalar s) {
    q *= s;
    p *= s;
    return *this;
  }
};

template <typename Scalar>
PhasePoint<Scalar> operator+(PhasePoint<Scalar> a, const PhasePoint<Scalar>& b) {
  return a += b;
}
template <typename Scalar>
PhasePoint<Scalar> operator-(PhasePoint<Scalar> a, const PhasePoint<Scalar>& b) {
  a.q -= b.q;
  a.p -= b.p;
  return a;
}
template <typename Scalar>
PhasePoint<Scalar> operator*(Scalar s, PhasePoint<Scalar> a) {
  return a *= s;
}

using State = PacketState<double>;
using ClassicalPoint = PhasePoint<double>;

struct SimConfig {
  double hbar = 0.1;
  double dt = 0.01;
  double t_final = 3.0;
  int dim = 1;

  void validate() const {
    if (!(hbar > 0)) throw std::invalid_argument("hbar must be positive");
    if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
    if (!(t_final >= 0)) throw std::invalid_argument("t_final must be non-negative");
    if (dim < 1 || dim > kMaxDim)
      throw std::invalid_argument("dimension must be between 1 and " +
                                  std::to_string(kMaxDim));
  }
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Scalar>
bool all_finite(const PacketState<Scalar>& s) {
  return s.q.allFinite() && s.p.allFinite() && s.A.allFinite() && s.B.allFinite();
}

template <typename Scalar>
bool all_finite(const PhasePoint<Scalar>& z) {
  return z.q.allFinite() && z.p.allFinite();
}

}  // namespace sgwp
