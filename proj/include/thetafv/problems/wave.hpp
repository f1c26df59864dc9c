#pragma once

#include "thetafv/problem.hpp"

namespace thetafv {

enum class AdvectionOrder { FirstOrderUpwind, ThirdOrderUpwindBiased };

std::string to_string(AdvectionOrder order);
AdvectionOrder advection_order_from_string(const std::string& s);

enum class PulseShape { Sine, Gaussian };

struct WaveParams {
  double velocity = 1.0;
  double background = 1.0;
  double amplitude = 0.5;
  double pulse_start = 100.5;
  double pulse_length = 1.0;
  PulseShape shape = PulseShape::Sine;
  AdvectionOrder order = AdvectionOrder::ThirdOrderUpwindBiased;
};

/**
 * Continuity equation with a constant transport velocity,
 * d(rho)/dt + r^-2 d(r^2 rho U)/dr = 0.
 *
 * The initial pulse is one full sine period (or a Gaussian) of length
 * `pulse_length` starting at `pulse_start`. The inflow ghost cell carries the
 * exact solution rho0(r - U t) ((r - U t) / r)^2; the outflow face is plain
 * first-order upwind.
 *
 * The third-order variant reconstructs face values with the kappa = 1/3
 * upwind-biased stencil (-q_{i-1} + 5 q_i + 2 q_{i+1}) / 6 and falls back to
 * first order at the faces next to the boundaries. The Jacobian is always
 * the first-order upwind one.
 */
class WaveProblem final : public Problem {
 public:
  explicit WaveProblem(WaveParams params = {});

  const WaveParams& params() const { return params_; }

  std::string name() const override { return "wave"; }
  Eigen::Index num_vars() const override { return 1; }
  std::vector<std::string> variable_names() const override { return {"rho"}; }

  Field initial_state(const Grid& grid) const override;
  Field face_fluxes(const Field& q, const Grid& grid, double time) const override;
  Field sources(const Field& q, const Grid& grid, double time) const override;
  JacobianBlocks jacobian(const Field& q, const Grid& grid, double time) const override;
  Eigen::VectorXd wave_speed(const Field& q, const Grid& grid) const override;
  Eigen::VectorXd diffusivity(const Grid& grid) const override;
  bool time_dependent() const override { return true; }

  /// Cell averages of the exact solution at `time`.
  Field analytic_reference(const Grid& grid, double time) const override;

  double initial_profile(double r) const;
  double exact(const Grid& grid, double r, double time) const;

 private:
  WaveParams params_;
};

}  // namespace thetafv
