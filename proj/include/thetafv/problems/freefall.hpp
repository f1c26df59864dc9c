#pragma once

#include "thetafv/problem.hpp"

namespace thetafv {

struct FreeFallParams {
  double gamma = 5.0 / 3.0;
  double gm = 1.0;
  double outer_density = 1.0;
  /// Inflow Mach number at the outer boundary; fixes the (uniform) outer temperature.
  double outer_mach = 10.0;
  double energy_floor_fraction = 1e-10;
};

/**
 * Spherically symmetric adiabatic inflow onto a point mass.
 *
 * Conserved variables per cell: density, radial momentum density and
 * internal energy density, p = (gamma - 1) e. Fluxes are donor-cell upwind
 * with the face velocity taken as the mean of the adjacent cell velocities.
 * Sources: -dp/dr - rho GM / r^2 for momentum and -p div(u) for the
 * internal energy.
 *
 * Outer boundary: ghost cell with the fixed outer density and temperature
 * moving at the free-fall speed. Inner boundary: the ghost copies the first
 * zone (non-reflecting outflow).
 */
class FreeFallProblem final : public Problem {
 public:
  enum Var : Eigen::Index { kRho = 0, kMom = 1, kEint = 2 };

  explicit FreeFallProblem(FreeFallParams params = {});

  const FreeFallParams& params() const { return params_; }

  std::string name() const override { return "freefall"; }
  Eigen::Index num_vars() const override { return 3; }
  std::vector<std::string> variable_names() const override { return {"rho", "mom", "eint"}; }

  Field initial_state(const Grid& grid) const override;
  Field face_fluxes(const Field& q, const Grid& grid, double time) const override;
  Field sources(const Field& q, const Grid& grid, double time) const override;
  /// First-order upwind linearization with frozen face velocities, plus the
  /// pressure, gravity and expansion-work source derivatives. Diagonal
  /// contributions that would be negative (compressive work) are left out.
  JacobianBlocks jacobian(const Field& q, const Grid& grid, double time) const override;
  Eigen::VectorXd wave_speed(const Field& q, const Grid& grid) const override;
  Eigen::VectorXd diffusivity(const Grid& grid) const override;
  std::size_t apply_boundary_conditions(Field& q, const Grid& grid) const override;
  bool admissible(const Field& q) const override;

  /// Pressure-free free-fall solution rho ~ r^-3/2, u = -sqrt(2 GM / r)
  /// matched to the outer density (steady only, time = +inf).
  Field analytic_reference(const Grid& grid, double time) const override;

  double free_fall_speed(double r) const;
  double outer_energy(const Grid& grid) const;
  double energy_floor(const Grid& grid) const { return params_.energy_floor_fraction * outer_energy(grid); }
  Eigen::RowVector3d outer_ghost(const Grid& grid) const;

 private:
  struct Faces {
    Eigen::VectorXd velocity;  // N+1
    Eigen::VectorXd pressure;  // N+1
  };
  Faces face_values(const Field& q, const Grid& grid) const;

  FreeFallParams params_;
};

}  // namespace thetafv
