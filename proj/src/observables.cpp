#include "sgwp/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace sgwp {

PowerLawFit loglog_fit(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) throw std::invalid_argument("loglog_fit needs at least two points");
  Eigen::MatrixXd design(pairs.size(), 2);
  Eigen::VectorXd rhs(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [hbar, err] = pairs[i];
    if (!(hbar > 0) || !(err > 0))
      throw std::invalid_argument("loglog_fit: hbar and error values must be positive");
    design(i, 0) = 1.0;
    design(i, 1) = std::log(hbar);
    rhs(i) = std::log(err);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  return {coef(0), coef(1)};
}

}  // namespace sgwp
