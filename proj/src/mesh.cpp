#include "thetafv/mesh.hpp"

#include <cmath>

namespace thetafv {

std::string to_string(Geometry g) { return g == Geometry::Planar ? "planar" : "spherical"; }

Geometry geometry_from_string(const std::string& s) {
  if (s == "planar") return Geometry::Planar;
  if (s == "spherical") return Geometry::Spherical;
  throw MeshError("unknown geometry '" + s + "'");
}

double shell_volume(Geometry geometry, double a, double b) {
  if (geometry == Geometry::Planar) return b - a;
  return (b * b * b - a * a * a) / 3.0;
}

Grid::Grid(Geometry geometry, Eigen::VectorXd interfaces)
    : geometry_(geometry), interfaces_(std::move(interfaces)) {
  const Eigen::Index n = interfaces_.size() - 1;
  if (n < 3) throw MeshError("a grid needs at least 3 cells");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(interfaces_(j + 1) > interfaces_(j))) throw MeshError("interfaces must be strictly increasing");
  }
  if (geometry_ == Geometry::Spherical && !(interfaces_(0) > 0.0)) {
    throw MeshError("spherical grids need r_in > 0");
  }

  centers_ = 0.5 * (interfaces_.head(n) + interfaces_.tail(n));
  widths_ = interfaces_.tail(n) - interfaces_.head(n);
  volumes_.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) volumes_(j) = shell_volume(geometry_, interfaces_(j), interfaces_(j + 1));

  center_spacings_.resize(n + 1);
  center_spacings_(0) = centers_(0) - interfaces_(0);
  center_spacings_.segment(1, n - 1) = centers_.tail(n - 1) - centers_.head(n - 1);
  center_spacings_(n) = interfaces_(n) - centers_(n - 1);

  if (geometry_ == Geometry::Spherical) {
    areas_ = interfaces_.array().square().matrix();
  } else {
    areas_ = Eigen::VectorXd::Ones(n + 1);
  }
}

double Grid::total_volume() const { return shell_volume(geometry_, r_in(), r_out()); }

CellMetrics Grid::cell_metrics(Eigen::Index j) const {
  if (j < 0 || j >= size()) throw std::out_of_range("cell index " + std::to_string(j) + " out of range");
  return {volumes_(j), center_spacings_(j), center_spacings_(j + 1), interfaces_(j), interfaces_(j + 1)};
}

Grid build_grid(Geometry geometry, double r_in, double r_out, Eigen::Index n_cells, double stretch) {
  if (n_cells < 3) throw MeshError("n_cells must be at least 3");
  if (!(r_out > r_in)) throw MeshError("domain length must be positive");
  if (geometry == Geometry::Spherical && !(r_in > 0.0)) throw MeshError("spherical grids need r_in > 0");
  if (!(stretch >= 1.0) || !std::isfinite(stretch)) throw MeshError("stretch must be >= 1");

  const double length = r_out - r_in;
  Eigen::VectorXd interfaces(n_cells + 1);
  interfaces(0) = r_in;
  if (stretch == 1.0) {
    for (Eigen::Index j = 1; j < n_cells; ++j) {
      interfaces(j) = r_in + length * static_cast<double>(j) / static_cast<double>(n_cells);
    }
  } else {
    // dx_0 * (s^n - 1) / (s - 1) == length
    const double first = length * (stretch - 1.0) / (std::pow(stretch, static_cast<double>(n_cells)) - 1.0);
    double dx = first;
    double acc = 0.0;
    for (Eigen::Index j = 1; j < n_cells; ++j) {
      acc += dx;
      interfaces(j) = r_in + acc;
      dx *= stretch;
    }
  }
  interfaces(n_cells) = r_out;
  return Grid(geometry, std::move(interfaces));
}

}  // namespace thetafv
