#include "sgwp/field_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace sgwp {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double fd_step(const Vec& x) {
  return std::cbrt(kEps) * std::max(1.0, x.cwiseAbs().maxCoeff());
}

double deviation(double analytic, double approx) {
  return std::abs(analytic - approx) / std::max(1.0, std::abs(analytic));
}

// Central difference of a vector-valued function along coordinate i.
Eigen::VectorXd central(const std::function<Eigen::VectorXd(const Vec&)>& f, const Vec& x,
                        int i, double h) {
  Vec xp = x;
  Vec xm = x;
  xp(i) += h;
  xm(i) -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

// Checks analytic(x) (a matrix whose column i should equal d f / d x_i)
// against central differences of f.
DerivativeDeviation compare(std::string name,
                            const std::function<Eigen::VectorXd(const Vec&)>& lower,
                            const Eigen::MatrixXd& analytic, const Vec& x, double tol) {
  DerivativeDeviation dev{std::move(name), 0.0, true};
  const double h = fd_step(x);
  for (int i = 0; i < x.size(); ++i) {
    const Eigen::VectorXd approx = central(lower, x, i, h);
    for (int r = 0; r < approx.size(); ++r)
      dev.max_deviation = std::max(dev.max_deviation, deviation(analytic(r, i), approx(r)));
  }
  dev.passed = dev.max_deviation <= tol;
  return dev;
}

DerivativeDeviation symmetry(std::string name, const Mat& m, double tol) {
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  return {std::move(name), asym, asym <= tol};
}

Eigen::VectorXd scalar_vec(double v) { return Eigen::VectorXd::Constant(1, v); }

// Fixed symmetric contraction matrix used to probe grad_hess_trace callbacks.
Mat probe_matrix(int d) {
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = (i == j) ? 1.0 + 0.5 * i : 0.3 / (1 + i + j);
  return m;
}

}  // namespace

bool FdReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

std::string FdReport::failures() const {
  std::string out;
  for (const auto& e : entries) {
    if (e.passed) continue;
    if (!out.empty()) out += ",";
    out += e.callback;
  }
  return out;
}

FdReport fd_cross_check(const FieldModel<double>& f, const Vec& x, double tol) {
  const int d = f.dim();
  if (x.size() != d) throw std::invalid_argument("fd_cross_check: dimension mismatch");
  const Mat probe = probe_matrix(d);
  FdReport report;
  auto& e = report.entries;

  e.push_back(compare("grad_v", [&](const Vec& y) { return scalar_vec(f.v(y)); },
                      f.grad_v(x).transpose(), x, tol));
  {
    const Mat h = f.hess_v(x);
    e.push_back(compare("hess_v", [&](const Vec& y) -> Eigen::VectorXd { return f.grad_v(y); },
                        h, x, tol));
    e.push_back(symmetry("hess_v_symmetry", h, tol));
  }
  e.push_back(compare(
      "grad_hess_trace_v",
      [&](const Vec& y) { return scalar_vec(probe.cwiseProduct(f.hess_v(y)).sum()); },
      f.grad_hess_trace_v(x, probe).transpose(), x, tol));

  e.push_back(compare("jac_a", [&](const Vec& y) -> Eigen::VectorXd { return f.a(y); },
                      f.jac_a(x), x, tol));
  for (int k = 0; k < d; ++k) {
    const std::string sfx = "[" + std::to_string(k + 1) + "]";
    const Mat h = f.hess_a(x, k);
    e.push_back(compare(
        "hess_a" + sfx,
        [&](const Vec& y) -> Eigen::VectorXd { return f.jac_a(y).row(k).transpose(); }, h, x,
        tol));
    e.push_back(symmetry("hess_a_symmetry" + sfx, h, tol));
    e.push_back(compare(
        "grad_hess_trace_a" + sfx,
        [&](const Vec& y) { return scalar_vec(probe.cwiseProduct(f.hess_a(y, k)).sum()); },
        f.grad_hess_trace_a(x, probe, k).transpose(), x, tol));
  }
  return report;
}

FdReport fd_cross_check_squares(const FieldModel<double>& f, const Vec& x, double tol) {
  const int d = f.dim();
  if (x.size() != d) throw std::invalid_argument("fd_cross_check: dimension mismatch");
  const Mat probe = probe_matrix(d);
  FdReport report;
  auto& e = report.entries;
  e.push_back(compare("grad_asq", [&](const Vec& y) { return scalar_vec(asq(f, y)); },
                      grad_asq(f, x).transpose(), x, tol));
  // Second derivatives from values directly, with a larger step.
  const double h2 = std::pow(kEps, 0.25) * std::max(1.0, x.cwiseAbs().maxCoeff());
  {
    const Mat h = hess_asq(f, x);
    DerivativeDeviation dev{"hess_asq", 0.0, true};
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        auto val = [&](double si, double sj) {
          Vec y = x;
          y(i) += si * h2;
          y(j) += sj * h2;
          return asq(f, y);
        };
        const double approx =
            (val(1, 1) - val(1, -1) - val(-1, 1) + val(-1, -1)) / (4 * h2 * h2);
        dev.max_deviation = std::max(dev.max_deviation, deviation(h(i, j), approx));
      }
    }
    dev.passed = dev.max_deviation <= tol;
    e.push_back(dev);
  }
  e.push_back(compare(
      "grad_hess_trace_asq",
      [&](const Vec& y) { return scalar_vec(probe.cwiseProduct(hess_asq(f, y)).sum()); },
      grad_hess_trace_asq(f, x, probe).transpose(), x, tol));
  return report;
}

bool rotational_symmetry_check(const FieldModel<double>& f, const Mat& r, const Vec& x,
                               double tol) {
  const int d = f.dim();
  if (r.rows() != d || r.cols() != d || x.size() != d)
    throw std::invalid_argument("rotational_symmetry_check: dimension mismatch");
  if ((r.transpose() * r - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10 ||
      std::abs(r.determinant() - 1.0) > 1e-10)
    throw std::invalid_argument("rotational_symmetry_check: R is not a proper rotation");
  if (d == 1) return true;
  const Vec rx = r * x;
  if (std::abs(f.v(rx) - f.v(x)) > tol) return false;
  if ((f.a(rx) - r * f.a(x)).cwiseAbs().maxCoeff() > tol) return false;
  return (f.jac_a(rx) - r * f.jac_a(x) * r.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Mat plane_rotation(int dim, int i, int j, double angle) {
  Mat r = Mat::Identity(dim, dim);
  const double c = std::cos(angle), s = std::sin(angle);
  r(i, i) = c;
  r(j, j) = c;
  r(i, j) = -s;
  r(j, i) = s;
  return r;
}

}  // namespace sgwp
