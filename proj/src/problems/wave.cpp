#include "thetafv/problems/wave.hpp"

#include <cmath>
#include <numbers>

namespace thetafv {

std::string to_string(AdvectionOrder order) {
  return order == AdvectionOrder::FirstOrderUpwind ? "first" : "third";
}

AdvectionOrder advection_order_from_string(const std::string& s) {
  if (s == "first") return AdvectionOrder::FirstOrderUpwind;
  if (s == "third") return AdvectionOrder::ThirdOrderUpwindBiased;
  throw std::invalid_argument("unknown advection order '" + s + "'");
}

WaveProblem::WaveProblem(WaveParams params) : params_(params) {
  if (!(params_.velocity != 0.0) || !std::isfinite(params_.velocity)) {
    throw std::invalid_argument("transport velocity must be non-zero");
  }
  if (!(params_.pulse_length > 0.0)) throw std::invalid_argument("pulse length must be positive");
}

double WaveProblem::initial_profile(double r) const {
  const double s = (r - params_.pulse_start) / params_.pulse_length;
  if (params_.shape == PulseShape::Gaussian) {
    const double d = 4.0 * (s - 0.5);
    return params_.background + params_.amplitude * std::exp(-d * d);
  }
  if (s < 0.0 || s > 1.0) return params_.background;
  return params_.background + params_.amplitude * std::sin(2.0 * std::numbers::pi * s);
}

double WaveProblem::exact(const Grid& grid, double r, double time) const {
  const double foot = r - params_.velocity * time;
  const double value = initial_profile(foot);
  if (grid.geometry() == Geometry::Planar) return value;
  const double ratio = foot / r;
  return value * ratio * ratio;
}

Field WaveProblem::initial_state(const Grid& grid) const { return analytic_reference(grid, 0.0); }

Field WaveProblem::analytic_reference(const Grid& grid, double time) const {
  if (!std::isfinite(time)) throw ReferenceUnavailable("the wave problem has no steady reference");
  Field q(grid.size(), 1);
  q.col(0) = cell_averages(grid, [&](double r) { return exact(grid, r, time); });
  return q;
}

Field WaveProblem::face_fluxes(const Field& q, const Grid& grid, double time) const {
  const Eigen::Index n = grid.size();
  const double u = params_.velocity;
  const bool third = params_.order == AdvectionOrder::ThirdOrderUpwindBiased;
  const auto& x = grid.interfaces();
  Field flux(n + 1, 1);
  for (Eigen::Index f = 0; f <= n; ++f) {
    double face;
    if (u > 0.0) {
      if (f == 0) {
        face = exact(grid, x(0) - 0.5 * grid.widths()(0), time);
      } else if (third && f >= 2 && f <= n - 1) {
        face = (-q(f - 2, 0) + 5.0 * q(f - 1, 0) + 2.0 * q(f, 0)) / 6.0;
      } else {
        face = q(f - 1, 0);
      }
    } else {
      if (f == n) {
        face = exact(grid, x(n) + 0.5 * grid.widths()(n - 1), time);
      } else if (third && f >= 1 && f <= n - 2) {
        face = (2.0 * q(f - 1, 0) + 5.0 * q(f, 0) - q(f + 1, 0)) / 6.0;
      } else {
        face = q(f, 0);
      }
    }
    flux(f, 0) = grid.areas()(f) * u * face;
  }
  return flux;
}

Field WaveProblem::sources(const Field& q, const Grid& /*grid*/, double /*time*/) const {
  return Field::Zero(q.rows(), 1);
}

JacobianBlocks WaveProblem::jacobian(const Field& /*q*/, const Grid& grid, double /*time*/) const {
  const Eigen::Index n = grid.size();
  const double u = params_.velocity;
  const auto& area = grid.areas();
  JacobianBlocks jac(n, 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double vol = grid.volumes()(j);
    if (u > 0.0) {
      jac.diag[j](0, 0) = area(j + 1) * u / vol;
      jac.lower[j](0, 0) = -area(j) * u / vol;
    } else {
      jac.diag[j](0, 0) = -area(j) * u / vol;
      jac.upper[j](0, 0) = area(j + 1) * u / vol;
    }
  }
  return jac;
}

Eigen::VectorXd WaveProblem::wave_speed(const Field& q, const Grid& /*grid*/) const {
  return Eigen::VectorXd::Constant(q.rows(), std::abs(params_.velocity));
}

Eigen::VectorXd WaveProblem::diffusivity(const Grid& grid) const { return Eigen::VectorXd::Zero(grid.size()); }

}  // namespace thetafv
