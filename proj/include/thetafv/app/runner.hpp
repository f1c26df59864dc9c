#pragma once

#include "thetafv/app/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thetafv::app {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form; locale independent.
std::string format_double(double value);

void write_history_csv(std::ostream& out, const History& history);
void write_profile_csv(std::ostream& out, const Grid& grid, const Field& q, const std::vector<std::string>& names);

struct RunReport {
  Outcome outcome = Outcome::Running;
  std::size_t iterations = 0;
  std::size_t total_inner_iterations = 0;
  double final_residual = 0.0;
  double final_time = 0.0;
  double wall_seconds = 0.0;

  int exit_code() const { return thetafv::exit_code(outcome); }
};

std::string format_report(const RunReport& report);

struct RunArtifacts {
  RunReport report;
  MarchResult result;
  std::optional<Field> reference;  ///< analytic reference at the final time, when the problem has one
};

/// Runs the configured solve without touching the file system.
RunArtifacts execute(const RunConfig& config);

/// Runs the solve and writes history.csv, profile.csv and, if available and
/// enabled, reference.csv into out_dir (created if missing).
RunReport run(const RunConfig& config, const std::filesystem::path& out_dir);

struct SweepRow {
  std::string value;
  RunReport report;
};

/// "1, 2.5,5" -> {"1", "2.5", "5"}; empty entries are rejected.
std::vector<std::string> split_values(const std::string& list);

/// Interprets a sweep value: JSON literals (numbers, true/false, null) as
/// such, anything else as a string.
nlohmann::json sweep_value(const std::string& text);

/// One run per value, each in out_dir/<param>=<value>/, plus
/// out_dir/sweep_summary.csv with columns value,outcome,iterations,final_residual.
std::vector<SweepRow> sweep(const RunConfig& base, const std::string& param, const std::vector<std::string>& values,
                            const std::filesystem::path& out_dir);

}  // namespace thetafv::app
