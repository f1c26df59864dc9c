#include "thetafv/problems/freefall.hpp"

#include <cmath>
#include <limits>

namespace thetafv {

FreeFallProblem::FreeFallProblem(FreeFallParams params) : params_(params) {
  if (!(params_.gamma > 1.0)) throw std::invalid_argument("adiabatic index must exceed 1");
  if (!(params_.gm > 0.0)) throw std::invalid_argument("GM must be positive");
  if (!(params_.outer_density > 0.0)) throw std::invalid_argument("outer density must be positive");
  if (!(params_.outer_mach > 0.0)) throw std::invalid_argument("outer Mach number must be positive");
}

double FreeFallProblem::free_fall_speed(double r) const { return std::sqrt(2.0 * params_.gm / r); }

double FreeFallProblem::outer_energy(const Grid& grid) const {
  const double c = free_fall_speed(grid.r_out()) / params_.outer_mach;
  const double g = params_.gamma;
  return params_.outer_density * c * c / (g * (g - 1.0));
}

Eigen::RowVector3d FreeFallProblem::outer_ghost(const Grid& grid) const {
  const double rho = params_.outer_density;
  return {rho, -rho * free_fall_speed(grid.r_out()), outer_energy(grid)};
}

Field FreeFallProblem::initial_state(const Grid& grid) const {
  Field q(grid.size(), 3);
  q.col(kRho).setConstant(params_.outer_density);
  q.col(kMom).setZero();
  q.col(kEint).setConstant(outer_energy(grid));
  return q;
}

FreeFallProblem::Faces FreeFallProblem::face_values(const Field& q, const Grid& grid) const {
  const Eigen::Index n = grid.size();
  const double gm1 = params_.gamma - 1.0;
  const Eigen::VectorXd u = q.col(kMom).cwiseQuotient(q.col(kRho));
  const Eigen::VectorXd p = gm1 * q.col(kEint);
  const Eigen::RowVector3d ghost = outer_ghost(grid);

  Faces faces{Eigen::VectorXd(n + 1), Eigen::VectorXd(n + 1)};
  faces.velocity(0) = u(0);
  faces.pressure(0) = p(0);
  faces.velocity.segment(1, n - 1) = 0.5 * (u.head(n - 1) + u.tail(n - 1));
  faces.pressure.segment(1, n - 1) = 0.5 * (p.head(n - 1) + p.tail(n - 1));
  faces.velocity(n) = 0.5 * (u(n - 1) + ghost(kMom) / ghost(kRho));
  faces.pressure(n) = 0.5 * (p(n - 1) + gm1 * ghost(kEint));
  return faces;
}

Field FreeFallProblem::face_fluxes(const Field& q, const Grid& grid, double /*time*/) const {
  const Eigen::Index n = grid.size();
  const Faces faces = face_values(q, grid);
  const Eigen::RowVector3d ghost = outer_ghost(grid);
  Field flux(n + 1, 3);
  for (Eigen::Index f = 0; f <= n; ++f) {
    const double uf = faces.velocity(f);
    const double scale = grid.areas()(f) * uf;
    if (f == 0) {
      flux.row(f) = scale * q.row(0);
    } else if (f == n) {
      flux.row(f) = uf >= 0.0 ? Eigen::RowVector3d(scale * q.row(n - 1)) : Eigen::RowVector3d(scale * ghost);
    } else {
      flux.row(f) = scale * q.row(uf >= 0.0 ? f - 1 : f);
    }
  }
  return flux;
}

Field FreeFallProblem::sources(const Field& q, const Grid& grid, double /*time*/) const {
  const Eigen::Index n = grid.size();
  const Faces faces = face_values(q, grid);
  const double gm1 = params_.gamma - 1.0;
  Field s = Field::Zero(n, 3);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double r = grid.centers()(j);
    const double div = (grid.areas()(j + 1) * faces.velocity(j + 1) - grid.areas()(j) * faces.velocity(j)) /
                       grid.volumes()(j);
    s(j, kMom) = -(faces.pressure(j + 1) - faces.pressure(j)) / grid.widths()(j) - q(j, kRho) * params_.gm / (r * r);
    s(j, kEint) = -gm1 * q(j, kEint) * div;
  }
  return s;
}

JacobianBlocks FreeFallProblem::jacobian(const Field& q, const Grid& grid, double /*time*/) const {
  const Eigen::Index n = grid.size();
  const Faces faces = face_values(q, grid);
  const double gm1 = params_.gamma - 1.0;
  const auto& area = grid.areas();
  JacobianBlocks jac(n, 3);
  const Block eye = Block::Identity(3, 3);

  for (Eigen::Index j = 0; j < n; ++j) {
    const double vol = grid.volumes()(j);
    const double dx = grid.widths()(j);
    Block& lower = jac.lower[j];
    Block& diag = jac.diag[j];
    Block& upper = jac.upper[j];

    // right face j+1
    const double ur = faces.velocity(j + 1);
    const double right = area(j + 1) * ur / vol;
    if (ur >= 0.0) {
      diag += right * eye;
    } else if (j + 1 < n) {
      upper += right * eye;
    }
    // left face j; the inner ghost copies cell 0, so only outflow is kept
    const double ul = faces.velocity(j);
    const double left = -area(j) * ul / vol;
    if (j == 0) {
      if (ul <= 0.0) diag += left * eye;
    } else if (ul >= 0.0) {
      lower += left * eye;
    } else {
      diag += left * eye;
    }

    // pressure gradient in the momentum equation
    const double half = 0.5 * gm1 / dx;
    diag(kMom, kEint) += half;
    if (j + 1 < n) upper(kMom, kEint) += half;
    if (j > 0) {
      diag(kMom, kEint) -= half;
      lower(kMom, kEint) -= half;
    } else {
      diag(kMom, kEint) -= 2.0 * half;
    }

    const double r = grid.centers()(j);
    diag(kMom, kRho) += params_.gm / (r * r);

    const double div = (area(j + 1) * ur - area(j) * ul) / vol;
    if (div > 0.0) diag(kEint, kEint) += gm1 * div;
  }
  return jac;
}

Eigen::VectorXd FreeFallProblem::wave_speed(const Field& q, const Grid& grid) const {
  const Eigen::Index n = grid.size();
  Eigen::VectorXd speed(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double rho = q(j, kRho);
    const double u = q(j, kMom) / rho;
    const double p = std::max(0.0, (params_.gamma - 1.0) * q(j, kEint));
    const double c = std::sqrt(params_.gamma * p / rho);
    const double r = grid.centers()(j);
    const double g = params_.gm / (r * r);
    speed(j) = std::abs(u) + c + std::sqrt(g * grid.widths()(j));
  }
  return speed;
}

Eigen::VectorXd FreeFallProblem::diffusivity(const Grid& grid) const { return Eigen::VectorXd::Zero(grid.size()); }

std::size_t FreeFallProblem::apply_boundary_conditions(Field& q, const Grid& grid) const {
  const double floor = energy_floor(grid);
  std::size_t hits = 0;
  for (Eigen::Index j = 0; j < q.rows(); ++j) {
    if (q(j, kEint) < floor) {
      q(j, kEint) = floor;
      ++hits;
    }
  }
  return hits;
}

bool FreeFallProblem::admissible(const Field& q) const {
  return q.allFinite() && (q.col(kRho).array() > 0.0).all();
}

Field FreeFallProblem::analytic_reference(const Grid& grid, double time) const {
  if (time != std::numeric_limits<double>::infinity()) {
    throw ReferenceUnavailable("free fall has only a steady reference");
  }
  const double r_out = grid.r_out();
  const double rho_out = params_.outer_density;
  const double e_out = outer_energy(grid);
  auto rho = [&](double r) { return rho_out * std::pow(r / r_out, -1.5); };
  Field q(grid.size(), 3);
  q.col(kRho) = cell_averages(grid, rho);
  q.col(kMom) = cell_averages(grid, [&](double r) { return -rho(r) * free_fall_speed(r); });
  q.col(kEint) = cell_averages(grid, [&](double r) { return e_out * std::pow(rho(r) / rho_out, params_.gamma); });
  return q;
}

}  // namespace thetafv
