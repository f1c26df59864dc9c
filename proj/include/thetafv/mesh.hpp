#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thetafv {

enum class Geometry { Planar, Spherical };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

class MeshError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Geometric factors of one cell, everything needed to assemble a
/// three-point row of the finite-volume operator.
struct CellMetrics {
  double volume;
  double spacing_left;   ///< distance from the left neighbour center (or the left boundary)
  double spacing_right;  ///< distance to the right neighbour center (or the right boundary)
  double r_left;
  double r_right;
};

/**
 * Immutable 1D finite-volume mesh.
 *
 * Cells are indexed in increasing r. Cell j is bounded by interfaces j and
 * j+1; its center is the arithmetic mean of the two. `center_spacings()(j)`
 * is the distance between the centers of cells j-1 and j; the first and last
 * entries measure from the boundary interface to the adjacent center.
 */
class Grid {
 public:
  Grid(Geometry geometry, Eigen::VectorXd interfaces);

  Geometry geometry() const { return geometry_; }
  Eigen::Index size() const { return centers_.size(); }

  const Eigen::VectorXd& interfaces() const { return interfaces_; }
  const Eigen::VectorXd& centers() const { return centers_; }
  const Eigen::VectorXd& volumes() const { return volumes_; }
  const Eigen::VectorXd& center_spacings() const { return center_spacings_; }
  const Eigen::VectorXd& widths() const { return widths_; }
  /// Face area per unit solid angle: r^2 in spherical geometry, 1 in planar.
  const Eigen::VectorXd& areas() const { return areas_; }

  double r_in() const { return interfaces_(0); }
  double r_out() const { return interfaces_(interfaces_.size() - 1); }
  double total_volume() const;
  double min_width() const { return widths_.minCoeff(); }

  CellMetrics cell_metrics(Eigen::Index j) const;

 private:
  Geometry geometry_;
  Eigen::VectorXd interfaces_;
  Eigen::VectorXd centers_;
  Eigen::VectorXd volumes_;
  Eigen::VectorXd center_spacings_;
  Eigen::VectorXd widths_;
  Eigen::VectorXd areas_;
};

/// Uniform (stretch == 1) or geometrically stretched grid on [r_in, r_out];
/// with stretch > 1 every cell is `stretch` times wider than its left neighbour.
Grid build_grid(Geometry geometry, double r_in, double r_out, Eigen::Index n_cells, double stretch = 1.0);

/// Volume of [a, b] in the given geometry (per unit solid angle for spherical).
double shell_volume(Geometry geometry, double a, double b);

}  // namespace thetafv
