#include "thetafv/scheme.hpp"

#include <algorithm>
#include <cmath>

namespace thetafv {

std::string to_string(MatrixLevel level) {
  switch (level) {
    case MatrixLevel::Identity: return "identity";
    case MatrixLevel::Diagonal: return "diagonal";
    case MatrixLevel::BlockDiagonal: return "block_diagonal";
    case MatrixLevel::Tridiagonal: return "tridiagonal";
    case MatrixLevel::BlockTridiagonal: return "block_tridiagonal";
  }
  return "unknown";
}

MatrixLevel matrix_level_from_string(const std::string& s) {
  for (auto level : {MatrixLevel::Identity, MatrixLevel::Diagonal, MatrixLevel::BlockDiagonal,
                     MatrixLevel::Tridiagonal, MatrixLevel::BlockTridiagonal}) {
    if (to_string(level) == s) return level;
  }
  throw std::invalid_argument("unknown matrix level '" + s + "'");
}

void SchemeConfig::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
  if (inner_iterations < 1) throw std::invalid_argument("inner_iterations must be >= 1");
  if (!(inner_tolerance > 0.0)) throw std::invalid_argument("inner_tolerance must be positive");
  if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
}

double SchemeConfig::effective_theta(double dt) const {
  if (theta_rule == ThetaRule::Fixed) return theta;
  return std::clamp((1.0 + alpha * dt) / 2.0, 0.0, 1.0);
}

TimeStep TimeStep::global(double dt, Eigen::Index n) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive and finite");
  return {Eigen::VectorXd::Constant(n, dt), dt, false};
}

TimeStep TimeStep::cellwise(Eigen::VectorXd dts) {
  if (dts.size() == 0 || !(dts.array() > 0.0).all() || !dts.allFinite()) {
    throw std::invalid_argument("local time steps must be positive and finite");
  }
  const double advance = dts.minCoeff();
  return {std::move(dts), advance, true};
}

TimeStep TimeStep::scaled(double factor) const { return {per_cell * factor, advance * factor, local}; }

State make_state(const Problem& problem, const Grid& grid) {
  State s;
  s.q_old = problem.initial_state(grid);
  problem.apply_boundary_conditions(s.q_old, grid);
  s.q_iter = s.q_old;
  return s;
}

namespace {

Field blend_rhs(const Field& q_iter, const Field& q_old, const TimeStep& dt, double theta, const Field* h_iter,
                const Field* h_old) {
  Field rhs = -((q_iter - q_old).array().colwise() / dt.per_cell.array()).matrix();
  if (theta > 0.0) rhs += theta * *h_iter;
  if (theta < 1.0) rhs += (1.0 - theta) * *h_old;
  return rhs;
}

void check_state(const State& state, const Grid& grid, Eigen::Index m, const TimeStep& dt) {
  if (state.q_old.rows() != grid.size() || state.q_iter.rows() != grid.size() || state.q_old.cols() != m ||
      state.q_iter.cols() != m) {
    throw std::invalid_argument("state does not match grid/problem dimensions");
  }
  if (dt.per_cell.size() != grid.size()) throw std::invalid_argument("time step does not match grid");
}

void check_diagonal_contribution(double d, Eigen::Index j, Eigen::Index k) {
  if (d < 0.0 || !std::isfinite(d)) {
    throw AssemblyError("negative diagonal contribution " + std::to_string(d) + " at cell " + std::to_string(j) +
                        ", variable " + std::to_string(k));
  }
}

}  // namespace

Field evaluate_rhs(const Problem& problem, const State& state, const Grid& grid, const TimeStep& dt, double theta) {
  check_state(state, grid, problem.num_vars(), dt);
  if (!state.q_old.allFinite() || !state.q_iter.allFinite()) throw DivergenceError("non-finite field values");
  Field h_iter;
  Field h_old;
  if (theta > 0.0) h_iter = problem.spatial_operator(state.q_iter, grid, state.time + dt.advance);
  if (theta < 1.0) h_old = problem.spatial_operator(state.q_old, grid, state.time);
  Field rhs = blend_rhs(state.q_iter, state.q_old, dt, theta, &h_iter, &h_old);
  if (!rhs.allFinite()) throw DivergenceError("non-finite right-hand side");
  return rhs;
}

LinearSystem assemble_from(const JacobianBlocks* jac, const TimeStep& dt, double theta, MatrixLevel level,
                           Eigen::Index m) {
  const Eigen::Index n = dt.per_cell.size();
  const Eigen::VectorXd inv_dt = dt.per_cell.cwiseInverse();
  const bool use_jacobian = theta > 0.0 && level != MatrixLevel::Identity;
  if (use_jacobian && (jac == nullptr || jac->size() != n)) throw std::invalid_argument("jacobian required");

  if (use_jacobian) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < m; ++k) check_diagonal_contribution(jac->diag[j](k, k), j, k);
    }
  }

  switch (level) {
    case MatrixLevel::Identity:
    case MatrixLevel::Diagonal: {
      Field entries(n, m);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
          entries(j, k) = use_jacobian ? inv_dt(j) + theta * jac->diag[j](k, k) : inv_dt(j);
        }
      }
      return linalg::DiagonalApprox<double>::scalar(std::move(entries));
    }
    case MatrixLevel::BlockDiagonal: {
      std::vector<Block> blocks(static_cast<std::size_t>(n));
      for (Eigen::Index j = 0; j < n; ++j) {
        blocks[j] = inv_dt(j) * Block::Identity(m, m);
        if (use_jacobian) blocks[j] += theta * jac->diag[j];
      }
      return linalg::DiagonalApprox<double>::block(std::move(blocks));
    }
    case MatrixLevel::Tridiagonal: {
      std::vector<linalg::TriDiagonal<double>> systems(static_cast<std::size_t>(m), linalg::TriDiagonal<double>(n));
      for (Eigen::Index k = 0; k < m; ++k) {
        auto& sys = systems[k];
        sys.diag = inv_dt;
        if (!use_jacobian) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
          sys.diag(j) += theta * jac->diag[j](k, k);
          if (j > 0) sys.sub(j - 1) = theta * jac->lower[j](k, k);
          if (j + 1 < n) sys.sup(j) = theta * jac->upper[j](k, k);
        }
      }
      return systems;
    }
    case MatrixLevel::BlockTridiagonal: {
      linalg::BlockTriDiagonal<double> sys(n, m);
      for (Eigen::Index j = 0; j < n; ++j) {
        sys.diag[j] = inv_dt(j) * Block::Identity(m, m);
        if (!use_jacobian) continue;
        sys.diag[j] += theta * jac->diag[j];
        if (j > 0) sys.sub[j - 1] = theta * jac->lower[j];
        if (j + 1 < n) sys.sup[j] = theta * jac->upper[j];
      }
      return sys;
    }
  }
  throw std::invalid_argument("unknown matrix level");
}

LinearSystem assemble(const Problem& problem, const State& state, const Grid& grid, const TimeStep& dt,
                      double theta, MatrixLevel level, const JacobianBlocks* jacobian) {
  check_state(state, grid, problem.num_vars(), dt);
  JacobianBlocks local;
  if (theta > 0.0 && level != MatrixLevel::Identity && jacobian == nullptr) {
    local = problem.jacobian(state.q_iter, grid, state.time + dt.advance);
    jacobian = &local;
  }
  return assemble_from(jacobian, dt, theta, level, problem.num_vars());
}

Field solve(const LinearSystem& system, const Field& rhs) {
  struct Visitor {
    const Field& rhs;
    Field operator()(const linalg::DiagonalApprox<double>& d) const { return linalg::solve_diagonal(d, rhs); }
    Field operator()(const std::vector<linalg::TriDiagonal<double>>& systems) const {
      if (static_cast<Eigen::Index>(systems.size()) != rhs.cols()) {
        throw linalg::DimensionError("one tridiagonal system per variable expected");
      }
      Field x(rhs.rows(), rhs.cols());
      for (Eigen::Index k = 0; k < rhs.cols(); ++k) {
        x.col(k) = linalg::solve_tridiagonal<double>(systems[k], rhs.col(k));
      }
      return x;
    }
    Field operator()(const linalg::BlockTriDiagonal<double>& b) const {
      return linalg::solve_block_tridiagonal(b, rhs);
    }
  };
  return std::visit(Visitor{rhs}, system);
}

StepResult step(const Problem& problem, State& state, const Grid& grid, const SchemeConfig& config,
                const TimeStep& dt) {
  config.validate();
  const Eigen::Index m = problem.num_vars();
  check_state(state, grid, m, dt);

  const double theta = config.effective_theta(dt.advance);
  const double t_old = state.time;
  const double t_new = t_old + dt.advance;
  const bool needs_jacobian = theta > 0.0 && config.matrix_level != MatrixLevel::Identity;

  StepResult result;
  state.q_iter = state.q_old;
  auto fail = [&](StepStatus status, std::string message) {
    state.q_iter = state.q_old;
    result.status = status;
    result.message = std::move(message);
    return result;
  };

  if (!state.q_old.allFinite()) return fail(StepStatus::NonFinite, "non-finite state at step start");

  Field h_old;
  Field h_iter;
  if (theta < 1.0) h_old = problem.spatial_operator(state.q_old, grid, t_old);
  if (theta > 0.0) {
    h_iter = theta < 1.0 && !problem.time_dependent() ? h_old
                                                       : problem.spatial_operator(state.q_iter, grid, t_new);
  }
  Field rhs = blend_rhs(state.q_iter, state.q_old, dt, theta, &h_iter, &h_old);
  if (!rhs.allFinite()) return fail(StepStatus::NonFinite, "non-finite right-hand side");

  const double r0 = rhs.lpNorm<Eigen::Infinity>();
  double r = r0;
  result.initial_residual = r0;

  JacobianBlocks jac;
  if (needs_jacobian && config.frozen_jacobian) jac = problem.jacobian(state.q_old, grid, t_new);

  for (int it = 1; it <= config.inner_iterations; ++it) {
    if (r0 == 0.0 || (it > 1 && r <= config.inner_tolerance * r0)) break;
    if (needs_jacobian && !config.frozen_jacobian) jac = problem.jacobian(state.q_iter, grid, t_new);

    Field dq;
    try {
      dq = solve(assemble_from(needs_jacobian ? &jac : nullptr, dt, theta, config.matrix_level, m), rhs);
    } catch (const linalg::SingularSystemError& e) {
      return fail(StepStatus::NonFinite, e.what());
    }
    state.q_iter += dq;
    result.floor_hits += problem.apply_boundary_conditions(state.q_iter, grid);
    if (!state.q_iter.allFinite()) return fail(StepStatus::NonFinite, "non-finite iterate");
    if (!problem.admissible(state.q_iter)) return fail(StepStatus::Inadmissible, "iterate violates positivity");

    if (theta > 0.0) h_iter = problem.spatial_operator(state.q_iter, grid, t_new);
    rhs = blend_rhs(state.q_iter, state.q_old, dt, theta, &h_iter, &h_old);
    if (!rhs.allFinite()) return fail(StepStatus::NonFinite, "non-finite right-hand side");
    r = rhs.lpNorm<Eigen::Infinity>();
    result.inner_iterations = it;
  }

  result.final_residual = r;
  state.q_old = state.q_iter;
  state.time = t_new;
  ++state.step_index;
  return result;
}

}  // namespace thetafv
