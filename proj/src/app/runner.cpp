#include "thetafv/app/runner.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <system_error>

namespace thetafv::app {

namespace fs = std::filesystem;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw OutputError("number formatting failed");
  return std::string(buf, end);
}

void write_history_csv(std::ostream& out, const History& history) {
  out << "iteration,time,dt,cfl,cfl_paper,residual_inf,inner_iters\n";
  for (const auto& r : history.records) {
    out << r.iteration << ',' << format_double(r.time) << ',' << format_double(r.dt) << ',' << format_double(r.cfl)
        << ',' << format_double(r.cfl_paper) << ',' << format_double(r.residual_inf) << ',' << r.inner_iters << '\n';
  }
}

void write_profile_csv(std::ostream& out, const Grid& grid, const Field& q, const std::vector<std::string>& names) {
  if (q.rows() != grid.size() || static_cast<std::size_t>(q.cols()) != names.size()) {
    throw OutputError("profile does not match grid or variable names");
  }
  out << "cell_index,r_center";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (Eigen::Index j = 0; j < q.rows(); ++j) {
    out << j << ',' << format_double(grid.centers()(j));
    for (Eigen::Index k = 0; k < q.cols(); ++k) out << ',' << format_double(q(j, k));
    out << '\n';
  }
}

std::string format_report(const RunReport& report) {
  std::ostringstream s;
  s << "outcome: " << to_string(report.outcome) << '\n'
    << "iterations: " << report.iterations << '\n'
    << "inner_iterations: " << report.total_inner_iterations << '\n'
    << "final_residual: " << format_double(report.final_residual) << '\n'
    << "final_time: " << format_double(report.final_time) << '\n'
    << "wall_seconds: " << format_double(report.wall_seconds) << '\n';
  return s.str();
}

RunArtifacts execute(const RunConfig& config) {
  config.validate();
  const auto problem = make_problem(config);
  const Grid grid = make_grid(config);
  RunArtifacts a;
  a.result = march(*problem, grid, make_march_options(config));

  const auto& h = a.result.history;
  a.report.outcome = h.outcome;
  a.report.iterations = h.records.size();
  a.report.total_inner_iterations = a.result.total_inner_iterations;
  a.report.final_residual = h.records.empty() ? 0.0 : h.records.back().residual_inf;
  a.report.final_time = a.result.state.time;
  a.report.wall_seconds = a.result.wall_seconds;

  const double ref_time = problem->time_dependent() ? a.result.state.time : std::numeric_limits<double>::infinity();
  try {
    a.reference = problem->analytic_reference(grid, ref_time);
  } catch (const ReferenceUnavailable&) {
  }
  return a;
}

namespace {

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot write '" + path.string() + "'");
  body(out);
  out.flush();
  if (!out) throw OutputError("write failed for '" + path.string() + "'");
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw OutputError("cannot create output directory '" + dir.string() + "'");
}

}  // namespace

RunReport run(const RunConfig& config, const fs::path& out_dir) {
  config.validate();
  ensure_directory(out_dir);
  const RunArtifacts a = execute(config);
  const auto problem = make_problem(config);
  const Grid grid = make_grid(config);
  const auto names = problem->variable_names();

  write_file(out_dir / "history.csv", [&](std::ostream& o) { write_history_csv(o, a.result.history); });
  write_file(out_dir / "profile.csv", [&](std::ostream& o) { write_profile_csv(o, grid, a.result.state.q_old, names); });
  if (config.write_reference && a.reference) {
    write_file(out_dir / "reference.csv", [&](std::ostream& o) { write_profile_csv(o, grid, *a.reference, names); });
  }
  return a.report;
}

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("empty entry in value list '" + list + "'");
    out.push_back(item.substr(first, last - first + 1));
  }
  if (out.empty()) throw ConfigError("empty value list");
  return out;
}

nlohmann::json sweep_value(const std::string& text) {
  const auto parsed = nlohmann::json::parse(text, nullptr, false);
  if (!parsed.is_discarded() && (parsed.is_number() || parsed.is_boolean() || parsed.is_null())) return parsed;
  return text;
}

std::vector<SweepRow> sweep(const RunConfig& base, const std::string& param, const std::vector<std::string>& values,
                            const fs::path& out_dir) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  // Validate every point before running anything.
  std::vector<RunConfig> configs;
  for (const auto& v : values) {
    RunConfig c = base;
    set_value(c, param, sweep_value(v));
    c.validate();
    configs.push_back(std::move(c));
  }
  ensure_directory(out_dir);
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    rows.push_back({values[i], run(configs[i], out_dir / (param + "=" + values[i]))});
  }
  write_file(out_dir / "sweep_summary.csv", [&](std::ostream& o) {
    o << "value,outcome,iterations,final_residual\n";
    for (const auto& r : rows) {
      o << r.value << ',' << to_string(r.report.outcome) << ',' << r.report.iterations << ','
        << format_double(r.report.final_residual) << '\n';
    }
  });
  return rows;
}

}  // namespace thetafv::app
