#pragma once

#include "thetafv/linalg.hpp"
#include "thetafv/mesh.hpp"
#include "thetafv/problem.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace thetafv {

/// How much of the coefficient matrix I/dt + theta A is kept.
enum class MatrixLevel { Identity, Diagonal, BlockDiagonal, Tridiagonal, BlockTridiagonal };

std::string to_string(MatrixLevel level);
MatrixLevel matrix_level_from_string(const std::string& s);

enum class ThetaRule { Fixed, DampedCrankNicolson };

struct SchemeConfig {
  double theta = 1.0;
  MatrixLevel matrix_level = MatrixLevel::Diagonal;
  int inner_iterations = 1;
  double inner_tolerance = 1e-3;
  ThetaRule theta_rule = ThetaRule::Fixed;
  double alpha = 1.0;  ///< damped Crank-Nicolson constant
  bool frozen_jacobian = false;

  void validate() const;
  /// Fixed: theta. Damped Crank-Nicolson: min(1, (1 + alpha dt) / 2).
  double effective_theta(double dt) const;
};

class SchemeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values in the iterate: the run is blowing up.
class DivergenceError : public SchemeError {
 public:
  using SchemeError::SchemeError;
};

/// The problem reported a negative scalar diagonal contribution.
class AssemblyError : public SchemeError {
 public:
  using SchemeError::SchemeError;
};

/// Per-cell time steps. `advance` is how far the physical time moves.
struct TimeStep {
  Eigen::VectorXd per_cell;
  double advance = 0.0;
  bool local = false;

  static TimeStep global(double dt, Eigen::Index n);
  static TimeStep cellwise(Eigen::VectorXd dts);
  TimeStep scaled(double factor) const;
};

struct State {
  Field q_old;
  Field q_iter;
  double time = 0.0;
  std::size_t step_index = 0;
};

/// Initial state of the problem with boundary treatment applied and q_iter = q_old.
State make_state(const Problem& problem, const Grid& grid);

using LinearSystem = std::variant<linalg::DiagonalApprox<double>,
                                  std::vector<linalg::TriDiagonal<double>>,  // one per variable
                                  linalg::BlockTriDiagonal<double>>;

/// RHS = -(q_iter - q_old) / dt + theta H(q_iter, t + dt) + (1 - theta) H(q_old, t).
Field evaluate_rhs(const Problem& problem, const State& state, const Grid& grid, const TimeStep& dt, double theta);

/**
 * Truncated coefficient matrix of (I/dt + theta A) dq = RHS.
 *
 * Identity keeps 1/dt only. Diagonal keeps 1/dt + theta D_kk per variable,
 * BlockDiagonal the whole M x M diagonal block. Tridiagonal keeps the scalar
 * three-point stencil of every variable (decoupled), BlockTridiagonal the
 * full block stencil. `jacobian` may be passed in to skip re-evaluation.
 */
LinearSystem assemble(const Problem& problem, const State& state, const Grid& grid, const TimeStep& dt,
                      double theta, MatrixLevel level, const JacobianBlocks* jacobian = nullptr);

LinearSystem assemble_from(const JacobianBlocks* jacobian, const TimeStep& dt, double theta, MatrixLevel level,
                           Eigen::Index n_vars);

Field solve(const LinearSystem& system, const Field& rhs);

enum class StepStatus { Ok, NonFinite, Inadmissible };

struct StepResult {
  StepStatus status = StepStatus::Ok;
  int inner_iterations = 0;
  double initial_residual = 0.0;  ///< ||RHS||_inf at q_iter = q_old
  double final_residual = 0.0;    ///< ||RHS||_inf after the last correction
  std::size_t floor_hits = 0;
  std::string message;

  bool ok() const { return status == StepStatus::Ok; }
};

/**
 * One time step of the defect-correction loop.
 *
 * Runs up to config.inner_iterations cycles of evaluate -> assemble ->
 * solve -> update and stops early once ||RHS||_inf drops below
 * inner_tolerance times its initial value. On success q_old <- q_iter and
 * the time advances; on failure the state is left exactly as it was.
 */
StepResult step(const Problem& problem, State& state, const Grid& grid, const SchemeConfig& config,
                const TimeStep& dt);

}  // namespace thetafv
