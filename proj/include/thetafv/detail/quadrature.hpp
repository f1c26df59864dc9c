#pragma once

#include <array>

namespace thetafv {

template <typename Fn>
Eigen::VectorXd cell_averages(const Grid& grid, Fn&& f) {
  static constexpr std::array<double, 5> nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                  0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                    0.4786286704993665, 0.2369268850561891};
  const auto& x = grid.interfaces();
  const bool spherical = grid.geometry() == Geometry::Spherical;
  Eigen::VectorXd avg(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    const double half = 0.5 * (x(j + 1) - x(j));
    const double mid = 0.5 * (x(j + 1) + x(j));
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double r = mid + half * nodes[k];
      const double w = weights[k] * (spherical ? r * r : 1.0);
      num += w * f(r);
      den += w;
    }
    avg(j) = num / den;
  }
  return avg;
}

}  // namespace thetafv
