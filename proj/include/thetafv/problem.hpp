#pragma once

#include "thetafv/linalg.hpp"
#include "thetafv/mesh.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace thetafv {

using Field = linalg::Field<double>;
using Block = linalg::Block<double>;

/// Per-cell blocks of A = -dH/dq.
///
/// lower[j] couples cell j to cell j-1 and upper[j] couples it to cell j+1.
/// lower[0] and upper[N-1] are the couplings to the boundary ghost values;
/// they are reported for completeness but never assembled.
struct JacobianBlocks {
  std::vector<Block> lower;
  std::vector<Block> diag;
  std::vector<Block> upper;

  JacobianBlocks() = default;
  JacobianBlocks(Eigen::Index n, Eigen::Index m)
      : lower(static_cast<std::size_t>(n), Block::Zero(m, m)),
        diag(static_cast<std::size_t>(n), Block::Zero(m, m)),
        upper(static_cast<std::size_t>(n), Block::Zero(m, m)) {}

  Eigen::Index size() const { return static_cast<Eigen::Index>(diag.size()); }
};

class ReferenceUnavailable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/**
 * A semi-discrete conservation law dq/dt = H(q) on a 1D grid.
 *
 * H is assembled from area-weighted interface fluxes and per-volume
 * sources, H_j = -(F_{j+1} - F_j) / vol_j + S_j, so the interior flux
 * contributions telescope. Boundary conditions enter through the boundary
 * fluxes (ghost values); apply_boundary_conditions() only enforces
 * floors on the interior state.
 */
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index num_vars() const = 0;
  virtual std::vector<std::string> variable_names() const = 0;

  virtual Field initial_state(const Grid& grid) const = 0;

  /// (N+1) x M fluxes through the interfaces, positive toward increasing r.
  virtual Field face_fluxes(const Field& q, const Grid& grid, double time) const = 0;
  /// N x M sources per unit volume (including non-conservative terms).
  virtual Field sources(const Field& q, const Grid& grid, double time) const = 0;

  Field spatial_operator(const Field& q, const Grid& grid, double time) const;

  virtual JacobianBlocks jacobian(const Field& q, const Grid& grid, double time) const = 0;

  /// Local signal speed |V| + V_S per cell.
  virtual Eigen::VectorXd wave_speed(const Field& q, const Grid& grid) const = 0;
  virtual Eigen::VectorXd diffusivity(const Grid& grid) const = 0;

  /// Returns the number of cells whose values were clamped.
  virtual std::size_t apply_boundary_conditions(Field& /*q*/, const Grid& /*grid*/) const { return 0; }
  virtual bool admissible(const Field& q) const { return q.allFinite(); }
  /// True when H depends on time explicitly (time-varying boundary data).
  virtual bool time_dependent() const { return false; }

  /// Cell-averaged reference solution. Steady references are requested with
  /// time = +infinity; throws ReferenceUnavailable otherwise.
  virtual Field analytic_reference(const Grid& grid, double time) const = 0;
};

/// Volume-weighted cell averages of f(r) using 5-point Gauss-Legendre per cell.
template <typename Fn>
Eigen::VectorXd cell_averages(const Grid& grid, Fn&& f);

}  // namespace thetafv

#include "thetafv/detail/quadrature.hpp"
