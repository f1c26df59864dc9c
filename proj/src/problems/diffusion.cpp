#include "thetafv/problems/diffusion.hpp"

#include <cmath>
#include <limits>

namespace thetafv {

DiffusionProblem::DiffusionProblem(DiffusionParams params) : params_(params) {
  if (!(params_.nu > 0.0)) throw std::invalid_argument("diffusivity must be positive");
}

Field DiffusionProblem::initial_state(const Grid& grid) const {
  const double r0 = 0.5 * (grid.r_in() + grid.r_out());
  Field q(grid.size(), 1);
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    const double d = grid.centers()(j) - r0;
    q(j, 0) = params_.initial_amplitude * std::exp(-params_.initial_sharpness * d * d);
  }
  return q;
}

Field DiffusionProblem::face_fluxes(const Field& q, const Grid& grid, double /*time*/) const {
  const Eigen::Index n = grid.size();
  const auto& area = grid.areas();
  const auto& dr = grid.center_spacings();
  Field flux(n + 1, 1);
  flux(0, 0) = -params_.nu * area(0) * (q(0, 0) - params_.inner_value) / dr(0);
  for (Eigen::Index f = 1; f < n; ++f) {
    flux(f, 0) = -params_.nu * area(f) * (q(f, 0) - q(f - 1, 0)) / dr(f);
  }
  flux(n, 0) = -params_.nu * area(n) * (params_.outer_value - q(n - 1, 0)) / dr(n);
  return flux;
}

Field DiffusionProblem::sources(const Field& q, const Grid& /*grid*/, double /*time*/) const {
  return Field::Constant(q.rows(), 1, params_.source);
}

JacobianBlocks DiffusionProblem::jacobian(const Field& /*q*/, const Grid& grid, double /*time*/) const {
  const Eigen::Index n = grid.size();
  JacobianBlocks jac(n, 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    const CellMetrics m = grid.cell_metrics(j);
    const double scale = params_.nu / m.volume;
    const double lower = -scale * grid.areas()(j) / m.spacing_left;
    const double upper = -scale * grid.areas()(j + 1) / m.spacing_right;
    jac.lower[j](0, 0) = lower;
    jac.upper[j](0, 0) = upper;
    jac.diag[j](0, 0) = -lower - upper;
  }
  return jac;
}

Eigen::VectorXd DiffusionProblem::wave_speed(const Field& q, const Grid& /*grid*/) const {
  return Eigen::VectorXd::Zero(q.rows());
}

Eigen::VectorXd DiffusionProblem::diffusivity(const Grid& grid) const {
  return Eigen::VectorXd::Constant(grid.size(), params_.nu);
}

double DiffusionProblem::steady_parabola(const Grid& grid, double r) const {
  const double rin = grid.r_in();
  const double rout = grid.r_out();
  const double linear = params_.inner_value + (params_.outer_value - params_.inner_value) * (r - rin) / (rout - rin);
  return -params_.source / (2.0 * params_.nu) * (r - rin) * (r - rout) + linear;
}

Field DiffusionProblem::analytic_reference(const Grid& grid, double time) const {
  if (time == 0.0) return initial_state(grid);
  if (time != std::numeric_limits<double>::infinity()) {
    throw ReferenceUnavailable("diffusion has references only at t = 0 and steady state");
  }
  Field q(grid.size(), 1);
  for (Eigen::Index j = 0; j < grid.size(); ++j) q(j, 0) = steady_parabola(grid, grid.centers()(j));
  return q;
}

}  // namespace thetafv
