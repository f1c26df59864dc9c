#pragma once

#include "thetafv/problem.hpp"

namespace thetafv {

struct DiffusionParams {
  double nu = 1e-2;
  double source = 1.0;
  double inner_value = 1.0;
  double outer_value = 1.0;
  double initial_amplitude = 10.0;
  double initial_sharpness = 10.0;  ///< T0 = A exp(-k (r - r0)^2)
};

/// dT/dt = r^-2 d/dr (r^2 nu dT/dr) + s with Dirichlet values on both
/// boundaries. The boundary flux uses the half-cell distance from the
/// boundary to the first/last center.
class DiffusionProblem final : public Problem {
 public:
  explicit DiffusionProblem(DiffusionParams params = {});

  const DiffusionParams& params() const { return params_; }

  std::string name() const override { return "diffusion"; }
  Eigen::Index num_vars() const override { return 1; }
  std::vector<std::string> variable_names() const override { return {"T"}; }

  Field initial_state(const Grid& grid) const override;
  Field face_fluxes(const Field& q, const Grid& grid, double time) const override;
  Field sources(const Field& q, const Grid& grid, double time) const override;
  JacobianBlocks jacobian(const Field& q, const Grid& grid, double time) const override;
  Eigen::VectorXd wave_speed(const Field& q, const Grid& grid) const override;
  Eigen::VectorXd diffusivity(const Grid& grid) const override;

  /// time = 0: the initial Gaussian; time = +inf: the steady parabola
  /// -(s / 2 nu)(r - r_in)(r - r_out) + T_b, exact in the planar limit with
  /// equal boundary values.
  Field analytic_reference(const Grid& grid, double time) const override;

  double steady_parabola(const Grid& grid, double r) const;

 private:
  DiffusionParams params_;
};

}  // namespace thetafv
