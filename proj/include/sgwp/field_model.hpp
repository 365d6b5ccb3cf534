#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "sgwp/types.hpp"

namespace sgwp {

/// Scalar potential V and vector potential A of a charged particle, with
/// analytic derivatives. The Jacobian follows jac_a(x)(i, j) = d A_i / d x_j.
///
/// Third derivatives are only exposed in contracted form:
/// grad_hess_trace_*(x, M)_i = d_i Tr(M D^2 f(x)) for symmetric M.
template <typename Scalar>
class FieldModel {
 public:
  using Vec = Vector<Scalar>;
  using Mat = Matrix<Scalar>;

  FieldModel(std::string name, int dim, Scalar mass)
      : name_(std::move(name)), dim_(dim), mass_(mass) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("unsupported dimension");
    if (!(mass > Scalar(0))) throw std::invalid_argument("mass must be positive");
  }
  virtual ~FieldModel() = default;

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  Scalar mass() const { return mass_; }

  virtual Scalar v(const Vec& x) const = 0;
  virtual Vec grad_v(const Vec& x) const = 0;
  virtual Mat hess_v(const Vec& x) const = 0;
  virtual Vec grad_hess_trace_v(const Vec& x, const Mat& m) const = 0;

  virtual Vec a(const Vec& x) const = 0;
  virtual Mat jac_a(const Vec& x) const = 0;
  virtual Mat hess_a(const Vec& x, int k) const = 0;
  virtual Vec grad_hess_trace_a(const Vec& x, const Mat& m, int k) const = 0;

 private:
  std::string name_;
  int dim_;
  Scalar mass_;
};

template <typename Scalar>
using FieldPtr = std::shared_ptr<const FieldModel<Scalar>>;

// |A|^2 and its derivatives, by the product rule on the A callbacks.

template <typename Scalar>
Scalar asq(const FieldModel<Scalar>& f, const Vector<Scalar>& x) {
  return f.a(x).squaredNorm();
}

template <typename Scalar>
Vector<Scalar> grad_asq(const FieldModel<Scalar>& f, const Vector<Scalar>& x) {
  return Scalar(2) * f.jac_a(x).transpose() * f.a(x);
}

template <typename Scalar>
Matrix<Scalar> hess_asq(const FieldModel<Scalar>& f, const Vector<Scalar>& x) {
  const auto av = f.a(x);
  const auto j = f.jac_a(x);
  Matrix<Scalar> h = j.transpose() * j;
  for (int k = 0; k < f.dim(); ++k) h += av(k) * f.hess_a(x, k);
  return Scalar(2) * h;
}

template <typename Scalar>
Vector<Scalar> grad_hess_trace_asq(const FieldModel<Scalar>& f, const Vector<Scalar>& x,
                                   const Matrix<Scalar>& m) {
  const auto av = f.a(x);
  const auto j = f.jac_a(x);
  Vector<Scalar> g = Vector<Scalar>::Zero(f.dim());
  for (int k = 0; k < f.dim(); ++k) {
    const Matrix<Scalar> hk = f.hess_a(x, k);
    const Vector<Scalar> grad_ak = j.row(k).transpose();
    g += Scalar(2) * (hk * (m * grad_ak)) + grad_ak * (m.cwiseProduct(hk)).sum() +
         av(k) * f.grad_hess_trace_a(x, m, k);
  }
  return Scalar(2) * g;
}

/// V(x) = 1 - cos^2(x)/2, A(x) = cos(x), d = 1, m = 1.
template <typename Scalar>
class CosineField final : public FieldModel<Scalar> {
 public:
  using typename FieldModel<Scalar>::Vec;
  using typename FieldModel<Scalar>::Mat;

  CosineField() : FieldModel<Scalar>("cosine1d", 1, Scalar(1)) {}

  Scalar v(const Vec& x) const override {
    using std::cos;
    const Scalar c = cos(x(0));
    return Scalar(1) - Scalar(0.5) * c * c;
  }
  Vec grad_v(const Vec& x) const override {
    using std::cos;
    using std::sin;
    return Vec::Constant(1, cos(x(0)) * sin(x(0)));
  }
  Mat hess_v(const Vec& x) const override {
    using std::cos;
    return Mat::Constant(1, 1, cos(Scalar(2) * x(0)));
  }
  Vec grad_hess_trace_v(const Vec& x, const Mat& m) const override {
    using std::sin;
    return Vec::Constant(1, Scalar(-2) * m(0, 0) * sin(Scalar(2) * x(0)));
  }

  Vec a(const Vec& x) const override {
    using std::cos;
    return Vec::Constant(1, cos(x(0)));
  }
  Mat jac_a(const Vec& x) const override {
    using std::sin;
    return Mat::Constant(1, 1, -sin(x(0)));
  }
  Mat hess_a(const Vec& x, int) const override {
    using std::cos;
    return Mat::Constant(1, 1, -cos(x(0)));
  }
  Vec grad_hess_trace_a(const Vec& x, const Mat& m, int) const override {
    using std::sin;
    return Vec::Constant(1, m(0, 0) * sin(x(0)));
  }
};

/// V(x) = |x|^2/2 + |x|^4/4, A(x) = (-x2, x1), d = 2, m = 1. Rotationally
/// symmetric.
template <typename Scalar>
class QuarticRotationalField final : public FieldModel<Scalar> {
 public:
  using typename FieldModel<Scalar>::Vec;
  using typename FieldModel<Scalar>::Mat;

  QuarticRotationalField() : FieldModel<Scalar>("quartic2d", 2, Scalar(1)) {}

  Scalar v(const Vec& x) const override {
    const Scalar r2 = x.squaredNorm();
    return Scalar(0.5) * r2 + Scalar(0.25) * r2 * r2;
  }
  Vec grad_v(const Vec& x) const override { return (Scalar(1) + x.squaredNorm()) * x; }
  Mat hess_v(const Vec& x) const override {
    return (Scalar(1) + x.squaredNorm()) * Mat::Identity(2, 2) +
           Scalar(2) * x * x.transpose();
  }
  // d_i Tr(M H) with H = (1+|x|^2) I + 2 x x^T:
  //   2 x_i Tr(M) + 4 (M x)_i
  Vec grad_hess_trace_v(const Vec& x, const Mat& m) const override {
    return Scalar(2) * m.trace() * x + Scalar(4) * (m * x);
  }

  Vec a(const Vec& x) const override {
    Vec out(2);
    out << -x(1), x(0);
    return out;
  }
  Mat jac_a(const Vec&) const override {
    Mat j(2, 2);
    j << Scalar(0), Scalar(-1), Scalar(1), Scalar(0);
    return j;
  }
  Mat hess_a(const Vec&, int) const override { return Mat::Zero(2, 2); }
  Vec grad_hess_trace_a(const Vec&, const Mat&, int) const override {
    return Vec::Zero(2);
  }
};

/// V(x) = x^T K x / 2 + b^T x + c, A(x) = M0 x + a0. Gaussian dynamics are
/// exact for this class.
template <typename Scalar>
class QuadraticLinearField final : public FieldModel<Scalar> {
 public:
  using typename FieldModel<Scalar>::Vec;
  using typename FieldModel<Scalar>::Mat;

  QuadraticLinearField(Mat k, Vec b, Scalar c, Mat m0, Vec a0, Scalar mass,
                       std::string name = "quadratic")
      : FieldModel<Scalar>(std::move(name), static_cast<int>(b.size()), mass),
        k_(std::move(k)),
        b_(std::move(b)),
        c_(c),
        m0_(std::move(m0)),
        a0_(std::move(a0)) {
    const int d = this->dim();
    if (k_.rows() != d || k_.cols() != d || m0_.rows() != d || m0_.cols() != d ||
        a0_.size() != d)
      throw std::invalid_argument("quadratic_linear: inconsistent dimensions");
    if ((k_ - k_.transpose()).cwiseAbs().maxCoeff() > Scalar(kSymmetryTolerance))
      throw std::invalid_argument("quadratic_linear: K must be symmetric");
    k_ = ((k_ + k_.transpose()) / Scalar(2)).eval();
  }

  Scalar v(const Vec& x) const override {
    return Scalar(0.5) * x.dot(k_ * x) + b_.dot(x) + c_;
  }
  Vec grad_v(const Vec& x) const override { return k_ * x + b_; }
  Mat hess_v(const Vec&) const override { return k_; }
  Vec grad_hess_trace_v(const Vec&, const Mat&) const override {
    return Vec::Zero(this->dim());
  }

  Vec a(const Vec& x) const override { return m0_ * x + a0_; }
  Mat jac_a(const Vec&) const override { return m0_; }
  Mat hess_a(const Vec&, int) const override {
    return Mat::Zero(this->dim(), this->dim());
  }
  Vec grad_hess_trace_a(const Vec&, const Mat&, int) const override {
    return Vec::Zero(this->dim());
  }

  const Mat& k() const { return k_; }
  const Vec& b() const { return b_; }
  const Mat& m0() const { return m0_; }
  const Vec& a0() const { return a0_; }

 private:
  Mat k_;
  Vec b_;
  Scalar c_;
  Mat m0_;
  Vec a0_;
};

/// Wraps a model and adds a linear term tilt^T x to V.
template <typename Scalar>
class TiltedField final : public FieldModel<Scalar> {
 public:
  using typename FieldModel<Scalar>::Vec;
  using typename FieldModel<Scalar>::Mat;

  TiltedField(FieldPtr<Scalar> base, Vec tilt)
      : FieldModel<Scalar>(base->name() + "+tilt", base->dim(), base->mass()),
        base_(std::move(base)),
        tilt_(std::move(tilt)) {
    if (tilt_.size() != this->dim()) throw std::invalid_argument("tilt dimension mismatch");
  }

  Scalar v(const Vec& x) const override { return base_->v(x) + tilt_.dot(x); }
  Vec grad_v(const Vec& x) const override { return base_->grad_v(x) + tilt_; }
  Mat hess_v(const Vec& x) const override { return base_->hess_v(x); }
  Vec grad_hess_trace_v(const Vec& x, const Mat& m) const override {
    return base_->grad_hess_trace_v(x, m);
  }
  Vec a(const Vec& x) const override { return base_->a(x); }
  Mat jac_a(const Vec& x) const override { return base_->jac_a(x); }
  Mat hess_a(const Vec& x, int k) const override { return base_->hess_a(x, k); }
  Vec grad_hess_trace_a(const Vec& x, const Mat& m, int k) const override {
    return base_->grad_hess_trace_a(x, m, k);
  }

 private:
  FieldPtr<Scalar> base_;
  Vec tilt_;
};

template <typename Scalar = double>
FieldPtr<Scalar> cosine_1d() {
  return std::make_shared<CosineField<Scalar>>();
}

template <typename Scalar = double>
FieldPtr<Scalar> quartic_rotational_2d() {
  return std::make_shared<QuarticRotationalField<Scalar>>();
}

template <typename Scalar = double>
FieldPtr<Scalar> quadratic_linear(Matrix<Scalar> k, Vector<Scalar> b, Scalar c,
                                  Matrix<Scalar> m0, Vector<Scalar> a0, Scalar mass) {
  return std::make_shared<QuadraticLinearField<Scalar>>(std::move(k), std::move(b), c,
                                                        std::move(m0), std::move(a0), mass);
}

/// V = A = 0.
template <typename Scalar = double>
FieldPtr<Scalar> free_particle(int dim, Scalar mass = Scalar(1)) {
  return std::make_shared<QuadraticLinearField<Scalar>>(
      Matrix<Scalar>::Zero(dim, dim), Vector<Scalar>::Zero(dim), Scalar(0),
      Matrix<Scalar>::Zero(dim, dim), Vector<Scalar>::Zero(dim), mass, "free");
}

}  // namespace sgwp
