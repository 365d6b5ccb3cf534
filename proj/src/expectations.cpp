#include "sgwp/expectations.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sgwp/packet.hpp"

namespace sgwp {

QuadratureRule::QuadratureRule(int n) {
  if (n < 1) throw std::invalid_argument("quadrature needs at least one node per dimension");
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Hermite
  // recurrence. Off-diagonal entries are sqrt(k/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = std::sqrt(k / 2.0);
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  nodes_.resize(n);
  weights_.resize(n);
  // The rule is symmetric; enforce it exactly so odd moments cancel.
  for (int i = 0; i < n; ++i)
    nodes_[i] = (es.eigenvalues()(i) - es.eigenvalues()(n - 1 - i)) / 2;
  // Squared eigenvector entries lose relative accuracy on the tiny outer
  // weights. The Christoffel form 1 / sum_k p_k(x)^2 over the orthonormal
  // polynomials keeps it.
  for (int i = 0; i < n; ++i) {
    const double x = nodes_[i];
    double prev = 0.0, cur = 1.0, sum = 1.0;
    for (int k = 1; k < n; ++k) {
      const double next =
          (x * cur - (k > 1 ? std::sqrt((k - 1) / 2.0) : 0.0) * prev) / std::sqrt(k / 2.0);
      prev = cur;
      cur = next;
      sum += cur * cur;
    }
    weights_[i] = 1.0 / sum;
  }
}

double gaussian_expectation(const ScalarField& u, const Vec& q, const Mat& b, double hbar,
                            const QuadratureRule& rule) {
  const int d = static_cast<int>(q.size());
  Eigen::LLT<Mat> llt(b);
  if (llt.info() != Eigen::Success) require_positive_definite(b);
  // x = q + sqrt(hbar) L^{-T} u
  const Mat lower = llt.matrixL();
  const Mat map = std::sqrt(hbar) *
                  lower.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(d, d));

  const int n = rule.nodes_per_dim();
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  int total = 1;
  for (int i = 0; i < d; ++i) total *= n;

  std::array<int, kMaxDim> idx{};
  Vec node(d);
  double sum = 0.0;
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      idx[i] = rem % n;
      rem /= n;
      node(i) = nodes[idx[i]];
      w *= weights[idx[i]];
    }
    sum += w * u(q + map * node);
  }
  return sum;
}

double asymptotic_expectation(double u_at_q, const Mat& hess_u_at_q, const Mat& b,
                              double hbar) {
  return u_at_q + hbar / 4.0 * (b.inverse() * hess_u_at_q).trace();
}

double polynomial_moment(std::span<const int> alpha, const Mat& b, double hbar) {
  const int d = static_cast<int>(b.rows());
  if (static_cast<int>(alpha.size()) != d)
    throw std::invalid_argument("multi-index length must equal the dimension");
  std::vector<int> idx;
  for (int i = 0; i < d; ++i) {
    if (alpha[i] < 0) throw std::invalid_argument("multi-index entries must be >= 0");
    for (int r = 0; r < alpha[i]; ++r) idx.push_back(i);
  }
  if (idx.size() > 4) throw std::invalid_argument("polynomial_moment supports |alpha| <= 4");
  const Mat cov = (hbar / 2.0) * b.inverse();
  switch (idx.size()) {
    case 0:
      return 1.0;
    case 2:
      return cov(idx[0], idx[1]);
    case 4: {
      const int i = idx[0], j = idx[1], k = idx[2], l = idx[3];
      return cov(i, j) * cov(k, l) + cov(i, k) * cov(j, l) + cov(i, l) * cov(j, k);
    }
    default:
      return 0.0;
  }
}

double full_hamiltonian(const State& s, const FieldModel<double>& model, double hbar,
                        const QuadratureRule& rule) {
  const double m = model.mass();
  const Mat binv = s.B.inverse();
  const Mat cross = s.A * binv;  // <Tr(DA^T A B^{-1})> integrand uses this
  const double kinetic =
      s.p.squaredNorm() / (2 * m) +
      hbar / (4 * m) * (binv * (s.A * s.A + s.B * s.B)).trace();
  auto integrand = [&](const Vec& x) {
    const Vec av = model.a(x);
    const Mat jac = model.jac_a(x);
    return -av.dot(s.p) / m - hbar / (2 * m) * (jac.transpose() * cross).trace() +
           av.squaredNorm() / (2 * m) + model.v(x);
  };
  return kinetic + gaussian_expectation(integrand, s.q, s.B, hbar, rule);
}

}  // namespace sgwp
