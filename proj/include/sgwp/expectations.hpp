#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sgwp/field_model.hpp"
#include "sgwp/types.hpp"

namespace sgwp {

/// Tensorised Gauss-Hermite rule for the weight exp(-|u|^2) on R^d. The
/// one-dimensional rule is exact for polynomials of degree <= 2n - 1.
class QuadratureRule {
 public:
  static constexpr int kDefaultNodes = 20;

  explicit QuadratureRule(int nodes_per_dim = kDefaultNodes);

  int nodes_per_dim() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  /// Weights normalised to sum to one (i.e. divided by sqrt(pi)).
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

using ScalarField = std::function<double(const Vec&)>;

/// <U> under the normalised density proportional to
/// exp(-(x-q)^T B (x-q) / hbar), via x = q + sqrt(hbar) L^{-T} u with B = L L^T.
/// Throws InvalidStateError if B is not positive definite.
double gaussian_expectation(const ScalarField& u, const Vec& q, const Mat& b, double hbar,
                            const QuadratureRule& rule);

/// Second-order Laplace expansion U(q) + (hbar/4) Tr(B^{-1} D^2 U(q)).
double asymptotic_expectation(double u_at_q, const Mat& hess_u_at_q, const Mat& b,
                              double hbar);

/// Exact central moment <prod_i (x-q)_i^alpha_i> for |alpha| <= 4 (Isserlis).
double polynomial_moment(std::span<const int> alpha, const Mat& b, double hbar);

/// Expectation of the Hamiltonian operator in the normalised packet,
/// with every potential term averaged by quadrature.
double full_hamiltonian(const State& s, const FieldModel<double>& model, double hbar,
                        const QuadratureRule& rule);

}  // namespace sgwp
