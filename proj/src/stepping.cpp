#include "thetafv/stepping.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace thetafv {

std::string to_string(ControllerMode mode) {
  switch (mode) {
    case ControllerMode::FixedCfl: return "fixed_cfl";
    case ControllerMode::Ramp: return "ramp";
    case ControllerMode::ResidualDriven: return "residual_driven";
  }
  return "unknown";
}

ControllerMode controller_mode_from_string(const std::string& s) {
  for (auto m : {ControllerMode::FixedCfl, ControllerMode::Ramp, ControllerMode::ResidualDriven}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown controller mode '" + s + "'");
}

std::string to_string(DiffusiveConvention c) { return c == DiffusiveConvention::Stability ? "stability" : "paper"; }

DiffusiveConvention diffusive_convention_from_string(const std::string& s) {
  if (s == "stability") return DiffusiveConvention::Stability;
  if (s == "paper") return DiffusiveConvention::Paper;
  throw std::invalid_argument("unknown diffusive CFL convention '" + s + "'");
}

void CflController::validate() const {
  switch (mode) {
    case ControllerMode::FixedCfl:
      if (!(cfl > 0.0) || !std::isfinite(cfl)) throw std::invalid_argument("cfl must be positive");
      break;
    case ControllerMode::Ramp:
      if (!(start > 0.0) || !(factor > 1.0) || !(cap >= start) || !std::isfinite(cap)) {
        throw std::invalid_argument("ramp needs start > 0, factor > 1, cap >= start");
      }
      break;
    case ControllerMode::ResidualDriven:
      if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
      if (local) throw std::invalid_argument("residual-driven steps are global");
      break;
  }
}

double CflController::target(std::size_t k) const {
  switch (mode) {
    case ControllerMode::FixedCfl: return cfl;
    case ControllerMode::Ramp: {
      const double ramped = start * std::pow(factor, static_cast<double>(k));
      return std::min(cap, ramped);
    }
    case ControllerMode::ResidualDriven: break;
  }
  throw ControllerError("residual-driven controller has no CFL target");
}

Eigen::VectorXd stability_bounds(const Problem& problem, const Field& q, const Grid& grid,
                                 DiffusiveConvention convention) {
  const double c = convention == DiffusiveConvention::Stability ? 2.0 : 1.0;
  const Eigen::VectorXd speed = problem.wave_speed(q, grid);
  const Eigen::VectorXd nu = problem.diffusivity(grid);
  const auto& dx = grid.widths();
  Eigen::VectorXd bound(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    double b = std::numeric_limits<double>::infinity();
    if (!std::isfinite(speed(j)) || !std::isfinite(nu(j))) throw ControllerError("non-finite wave speed");
    if (speed(j) > 0.0) b = std::min(b, dx(j) / speed(j));
    if (nu(j) > 0.0) b = std::min(b, dx(j) * dx(j) / (c * nu(j)));
    bound(j) = b;
  }
  return bound;
}

double advective_cfl_dt(const Problem& problem, const Field& q, const Grid& grid, double target_cfl,
                        DiffusiveConvention convention) {
  if (!(target_cfl > 0.0)) throw ControllerError("target CFL must be positive");
  const double b = stability_bounds(problem, q, grid, convention).minCoeff();
  if (!std::isfinite(b)) throw ControllerError("no cell constrains the time step");
  return target_cfl * b;
}

Eigen::VectorXd residual_smoothing_dts(const Problem& problem, const Field& q, const Grid& grid, double target_cfl,
                                       DiffusiveConvention convention) {
  if (!(target_cfl > 0.0)) throw ControllerError("target CFL must be positive");
  Eigen::VectorXd bound = stability_bounds(problem, q, grid, convention);
  double largest = 0.0;
  for (double b : bound) {
    if (std::isfinite(b)) largest = std::max(largest, b);
  }
  if (largest == 0.0) throw ControllerError("no cell constrains the time step");
  for (double& b : bound) {
    if (!std::isfinite(b)) b = largest;
  }
  return target_cfl * bound;
}

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Running: return "running";
    case Outcome::Converged: return "converged";
    case Outcome::Stagnated: return "stagnated";
    case Outcome::Diverged: return "diverged";
    case Outcome::BudgetExhausted: return "budget_exhausted";
    case Outcome::Completed: return "completed";
  }
  return "unknown";
}

int exit_code(Outcome outcome) {
  switch (outcome) {
    case Outcome::Converged:
    case Outcome::Completed: return 0;
    case Outcome::Stagnated: return 2;
    case Outcome::Diverged: return 3;
    case Outcome::BudgetExhausted:
    case Outcome::Running: return 4;
  }
  return 1;
}

void History::append(const HistoryRecord& record) {
  const double r = std::isfinite(record.residual_inf) ? record.residual_inf : std::numeric_limits<double>::infinity();
  best.push_back(best.empty() ? r : std::min(best.back(), r));
  records.push_back(record);
}

std::optional<double> residual_driven_dt(const History& history, const Grid& grid, double alpha0) {
  if (history.records.empty()) throw ControllerError("residual-driven step needs at least one record");
  const double residual = history.records.back().residual_inf;
  if (residual == 0.0) return std::nullopt;
  if (!(residual > 0.0) || !std::isfinite(residual)) throw ControllerError("invalid residual for step control");
  return alpha0 * grid.min_width() / residual;
}

Outcome monitor(const History& history, double residual_inf, const MonitorSettings& settings) {
  if (!std::isfinite(residual_inf)) return Outcome::Diverged;
  const double initial = history.records.empty() ? residual_inf : history.initial_residual();
  if (residual_inf <= settings.abs_tol || residual_inf <= settings.rel_tol * initial) return Outcome::Converged;
  if (residual_inf >= settings.divergence_factor * initial) return Outcome::Diverged;

  const std::size_t n = history.best.size() + 1;  // including residual_inf
  if (settings.window > 0 && n > settings.window) {
    const double before = history.best[n - 1 - settings.window];
    const double now = std::min(history.best.back(), residual_inf);
    if (now > (1.0 - settings.min_improvement) * before) return Outcome::Stagnated;
  }
  return Outcome::Running;
}

CflReport report_cfl(const Problem& problem, const Field& q, const Grid& grid, const Eigen::VectorXd& dts) {
  const Eigen::VectorXd speed = problem.wave_speed(q, grid);
  const Eigen::VectorXd nu = problem.diffusivity(grid);
  const auto& dx = grid.widths();
  const Eigen::ArrayXd advective = speed.array() / dx.array();
  const Eigen::ArrayXd diffusive = nu.array() / dx.array().square();
  const Eigen::ArrayXd rate = advective + 2.0 * diffusive;
  Eigen::Index cell = 0;
  rate.maxCoeff(&cell);
  const double dt = dts(cell);
  return {cell, dt, dt * rate(cell), dt * (advective(cell) + diffusive(cell))};
}

MarchResult march(const Problem& problem, const Grid& grid, const MarchOptions& options) {
  return march(problem, grid, options, make_state(problem, grid));
}

MarchResult march(const Problem& problem, const Grid& grid, const MarchOptions& options, State initial) {
  options.scheme.validate();
  options.controller.validate();
  if (options.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  const bool timed = std::isfinite(options.end_time);
  if (timed && options.controller.local) throw std::invalid_argument("local time steps need an open-ended run");

  const auto clock_start = std::chrono::steady_clock::now();
  MarchResult result;
  result.state = std::move(initial);
  State& state = result.state;
  History& history = result.history;
  const Eigen::Index n = grid.size();
  const double end_slack = 1e-12 * std::max(1.0, std::abs(options.end_time));
  auto reached_end = [&] { return timed && state.time >= options.end_time - end_slack; };

  Outcome outcome = Outcome::Running;
  for (std::size_t k = 0; k < options.max_iterations; ++k) {
    if (reached_end()) {
      outcome = Outcome::Completed;
      break;
    }

    TimeStep ts;
    const auto& ctl = options.controller;
    if (ctl.mode == ControllerMode::ResidualDriven) {
      std::optional<double> dt;
      if (history.records.empty()) {
        const double r = problem.spatial_operator(state.q_old, grid, state.time).lpNorm<Eigen::Infinity>();
        if (r > 0.0) dt = ctl.alpha0 * grid.min_width() / r;
      } else {
        dt = residual_driven_dt(history, grid, ctl.alpha0);
      }
      if (!dt) {
        outcome = Outcome::Converged;
        break;
      }
      ts = TimeStep::global(*dt, n);
    } else if (ctl.local) {
      ts = TimeStep::cellwise(residual_smoothing_dts(problem, state.q_old, grid, ctl.target(k), ctl.convention));
    } else {
      ts = TimeStep::global(advective_cfl_dt(problem, state.q_old, grid, ctl.target(k), ctl.convention), n);
    }
    if (timed && ts.advance > options.end_time - state.time) {
      ts = TimeStep::global(options.end_time - state.time, n);
    }

    const Field q_before = state.q_old;
    StepResult sr = step(problem, state, grid, options.scheme, ts);
    int attempt = 0;
    while (!sr.ok() && attempt < options.max_retries) {
      ts = ts.scaled(0.5);
      ++attempt;
      ++result.retries;
      sr = step(problem, state, grid, options.scheme, ts);
    }
    result.floor_hits += sr.floor_hits;
    result.total_inner_iterations += static_cast<std::size_t>(sr.inner_iterations);

    const CflReport rep = report_cfl(problem, q_before, grid, ts.per_cell);
    HistoryRecord record{k + 1, state.time, rep.dt, rep.cfl, rep.cfl_paper,
                         sr.ok() ? sr.initial_residual : std::numeric_limits<double>::quiet_NaN(),
                         sr.inner_iterations};
    outcome = monitor(history, record.residual_inf, options.monitor);
    if (timed && outcome != Outcome::Diverged) outcome = Outcome::Running;
    history.append(record);
    if (outcome != Outcome::Running) break;
  }
  if (outcome == Outcome::Running) outcome = reached_end() ? Outcome::Completed : Outcome::BudgetExhausted;
  history.outcome = outcome;
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return result;
}

}  // namespace thetafv
