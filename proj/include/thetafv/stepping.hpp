#pragma once

#include "thetafv/mesh.hpp"
#include "thetafv/problem.hpp"
#include "thetafv/scheme.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thetafv {

/// Normalization of the diffusive CFL number. Stability: 2 nu dt / dx^2, so
/// the explicit limit sits at 1. Paper: nu dt / dx^2.
enum class DiffusiveConvention { Stability, Paper };

enum class ControllerMode { FixedCfl, Ramp, ResidualDriven };

std::string to_string(ControllerMode mode);
ControllerMode controller_mode_from_string(const std::string& s);
std::string to_string(DiffusiveConvention c);
DiffusiveConvention diffusive_convention_from_string(const std::string& s);

struct CflController {
  ControllerMode mode = ControllerMode::FixedCfl;
  double cfl = 1.0;       ///< FixedCfl target
  double start = 0.1;     ///< Ramp: CFL_k = min(cap, start * factor^k)
  double factor = 1.1;
  double cap = 1.0;
  double alpha0 = 1.0;    ///< ResidualDriven: dt = alpha0 * min dx / residual
  bool local = false;     ///< per-cell steps (residual smoothing)
  DiffusiveConvention convention = DiffusiveConvention::Stability;

  void validate() const;
  /// Target CFL at (0-based) iteration k; not defined for ResidualDriven.
  double target(std::size_t k) const;
};

class ControllerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-cell stability bound min(dx / speed, dx^2 / (c nu)) with c = 2 for the
/// stability convention and 1 for the paper one; +inf where nothing constrains.
Eigen::VectorXd stability_bounds(const Problem& problem, const Field& q, const Grid& grid,
                                 DiffusiveConvention convention = DiffusiveConvention::Stability);

/// Global step target * min_j bound_j. Throws ControllerError if no cell is constrained.
double advective_cfl_dt(const Problem& problem, const Field& q, const Grid& grid, double target_cfl,
                        DiffusiveConvention convention = DiffusiveConvention::Stability);

/// Local steps target * bound_j. Unconstrained cells get the largest constrained step.
Eigen::VectorXd residual_smoothing_dts(const Problem& problem, const Field& q, const Grid& grid, double target_cfl,
                                       DiffusiveConvention convention = DiffusiveConvention::Stability);

struct HistoryRecord {
  std::size_t iteration;
  double time;
  double dt;
  double cfl;
  double cfl_paper;
  double residual_inf;
  int inner_iters;
};

enum class Outcome { Running, Converged, Stagnated, Diverged, BudgetExhausted, Completed };

std::string to_string(Outcome outcome);
int exit_code(Outcome outcome);

struct History {
  std::vector<HistoryRecord> records;
  /// best[i] = min residual over records[0..i]
  std::vector<double> best;
  Outcome outcome = Outcome::Running;

  void append(const HistoryRecord& record);
  double initial_residual() const { return records.empty() ? 0.0 : records.front().residual_inf; }
};

/// dt = alpha0 * min dx / residual of the latest record; nullopt when the residual is zero.
std::optional<double> residual_driven_dt(const History& history, const Grid& grid, double alpha0);

struct MonitorSettings {
  double abs_tol = 0.0;
  double rel_tol = 1e-8;
  std::size_t window = 2000;
  double min_improvement = 0.01;
  double divergence_factor = 1e8;
};

/**
 * Classify a run from its history plus the newest residual (not yet in the
 * history). Converged: residual <= abs_tol or <= rel_tol * initial.
 * Diverged: non-finite or >= divergence_factor * initial. Stagnated: the
 * best residual improved by less than min_improvement over the trailing
 * window. Otherwise Running.
 */
Outcome monitor(const History& history, double residual_inf, const MonitorSettings& settings);

/// CFL numbers reported for a step: the most restrictive cell is the one with
/// the largest rate speed/dx + 2 nu/dx^2.
struct CflReport {
  Eigen::Index cell;
  double dt;
  double cfl;        ///< dt (speed/dx + 2 nu/dx^2)
  double cfl_paper;  ///< dt (speed/dx + nu/dx^2)
};

CflReport report_cfl(const Problem& problem, const Field& q, const Grid& grid, const Eigen::VectorXd& dts);

struct MarchOptions {
  SchemeConfig scheme;
  CflController controller;
  MonitorSettings monitor;
  std::size_t max_iterations = 100000;
  double end_time = std::numeric_limits<double>::infinity();
  int max_retries = 10;
};

struct MarchResult {
  History history;
  State state;
  std::size_t floor_hits = 0;
  std::size_t retries = 0;
  std::size_t total_inner_iterations = 0;
  double wall_seconds = 0.0;
};

/**
 * Pseudo-time (or time-accurate, with a finite end_time) march of a problem.
 *
 * Each iteration chooses a step from the controller, advances one
 * defect-correction step and appends a History record whose residual is the
 * steady residual ||H||_inf of the state entering that step. A step that
 * produces non-finite or inadmissible values is retried at half the step up
 * to max_retries times. With a finite end_time only divergence stops the run
 * early and reaching end_time yields Completed.
 */
MarchResult march(const Problem& problem, const Grid& grid, const MarchOptions& options);
MarchResult march(const Problem& problem, const Grid& grid, const MarchOptions& options, State initial);

}  // namespace thetafv
