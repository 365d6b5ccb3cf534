#pragma once

#include <string>
#include <vector>

#include "sgwp/field_model.hpp"

namespace sgwp {

struct DerivativeDeviation {
  std::string callback;
  double max_deviation = 0.0;
  bool passed = true;
};

struct FdReport {
  std::vector<DerivativeDeviation> entries;

  bool passed() const;
  /// Comma-separated names of the callbacks that failed.
  std::string failures() const;
};

/// Compares every analytic derivative callback of `model` at `x` against
/// central differences of the callback one order below it. Deviations are
/// |analytic - fd| / max(1, |analytic|), maximised over entries. Symmetry of
/// the Hessian callbacks is checked as well.
FdReport fd_cross_check(const FieldModel<double>& model, const Vec& x, double tol);

/// Same check for the |A|^2 derivatives assembled from the A callbacks.
FdReport fd_cross_check_squares(const FieldModel<double>& model, const Vec& x, double tol);

/// V(Rx) = V(x), A(Rx) = R A(x) and DA(Rx) = R DA(x) R^T at `x`.
/// Throws std::invalid_argument if R is not a proper rotation.
bool rotational_symmetry_check(const FieldModel<double>& model, const Mat& rotation,
                               const Vec& x, double tol);

/// Rotation by `angle` in the (i, j) coordinate plane of R^d.
Mat plane_rotation(int dim, int i, int j, double angle);

}  // namespace sgwp
