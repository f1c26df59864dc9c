#include "thetafv/app/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>

namespace thetafv::app {

using nlohmann::json;

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Diffusion: return "diffusion";
    case ProblemKind::Wave: return "wave";
    case ProblemKind::FreeFall: return "freefall";
  }
  return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& s) {
  for (auto k : {ProblemKind::Diffusion, ProblemKind::Wave, ProblemKind::FreeFall}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown problem '" + s + "'");
}

namespace {

double as_double(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError(key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(key + ": expected a finite number");
  return d;
}

std::uint64_t as_count(const std::string& key, const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  // Sweeps hand over values like 7.0; accept integral doubles.
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && std::floor(d) == d && d < 9.0e15) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(key + ": expected a non-negative integer");
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) throw ConfigError(key + ": expected true or false");
  return v.get<bool>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) throw ConfigError(key + ": expected a string");
  return v.get<std::string>();
}

template <typename Fn>
auto parse_enum(const std::string& key, const json& v, Fn&& from_string) {
  const std::string s = as_string(key, v);
  try {
    return from_string(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

ThetaRule theta_rule_from_string(const std::string& s) {
  if (s == "fixed") return ThetaRule::Fixed;
  if (s == "damped_crank_nicolson") return ThetaRule::DampedCrankNicolson;
  throw std::invalid_argument("unknown theta rule '" + s + "'");
}

PulseShape pulse_shape_from_string(const std::string& s) {
  if (s == "sine") return PulseShape::Sine;
  if (s == "gaussian") return PulseShape::Gaussian;
  throw std::invalid_argument("unknown pulse shape '" + s + "'");
}

struct Setter {
  std::optional<ProblemKind> only;
  std::function<void(RunConfig&, const std::string&, const json&)> apply;
};

#define THETAFV_DOUBLE(field) [](RunConfig& c, const std::string& k, const json& v) { c.field = as_double(k, v); }

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    using K = ProblemKind;
    std::map<std::string, Setter> t;
    t["problem.kind"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                           if (problem_kind_from_string(as_string(k, v)) != c.problem) {
                             throw ConfigError(k + ": the problem can only be chosen once");
                           }
                         }};

    t["problem.nu"] = {K::Diffusion, THETAFV_DOUBLE(diffusion.nu)};
    t["problem.source"] = {K::Diffusion, THETAFV_DOUBLE(diffusion.source)};
    t["problem.inner_value"] = {K::Diffusion, THETAFV_DOUBLE(diffusion.inner_value)};
    t["problem.outer_value"] = {K::Diffusion, THETAFV_DOUBLE(diffusion.outer_value)};
    t["problem.initial_amplitude"] = {K::Diffusion, THETAFV_DOUBLE(diffusion.initial_amplitude)};
    t["problem.initial_sharpness"] = {K::Diffusion, THETAFV_DOUBLE(diffusion.initial_sharpness)};

    t["problem.velocity"] = {K::Wave, THETAFV_DOUBLE(wave.velocity)};
    t["problem.background"] = {K::Wave, THETAFV_DOUBLE(wave.background)};
    t["problem.amplitude"] = {K::Wave, THETAFV_DOUBLE(wave.amplitude)};
    t["problem.pulse_start"] = {K::Wave, THETAFV_DOUBLE(wave.pulse_start)};
    t["problem.pulse_length"] = {K::Wave, THETAFV_DOUBLE(wave.pulse_length)};
    t["problem.shape"] = {K::Wave, [](RunConfig& c, const std::string& k, const json& v) {
                            c.wave.shape = parse_enum(k, v, pulse_shape_from_string);
                          }};
    t["problem.order"] = {K::Wave, [](RunConfig& c, const std::string& k, const json& v) {
                            c.wave.order = parse_enum(k, v, advection_order_from_string);
                          }};

    t["problem.gamma"] = {K::FreeFall, THETAFV_DOUBLE(freefall.gamma)};
    t["problem.gm"] = {K::FreeFall, THETAFV_DOUBLE(freefall.gm)};
    t["problem.outer_density"] = {K::FreeFall, THETAFV_DOUBLE(freefall.outer_density)};
    t["problem.outer_mach"] = {K::FreeFall, THETAFV_DOUBLE(freefall.outer_mach)};
    t["problem.energy_floor_fraction"] = {K::FreeFall, THETAFV_DOUBLE(freefall.energy_floor_fraction)};

    t["grid.geometry"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                            c.grid.geometry = parse_enum(k, v, geometry_from_string);
                          }};
    t["grid.r_in"] = {std::nullopt, THETAFV_DOUBLE(grid.r_in)};
    t["grid.r_out"] = {std::nullopt, THETAFV_DOUBLE(grid.r_out)};
    t["grid.cells"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                         c.grid.cells = static_cast<Eigen::Index>(as_count(k, v));
                       }};
    t["grid.stretch"] = {std::nullopt, THETAFV_DOUBLE(grid.stretch)};

    t["scheme.theta"] = {std::nullopt, THETAFV_DOUBLE(scheme.theta)};
    t["scheme.matrix_level"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                                  c.scheme.matrix_level = parse_enum(k, v, matrix_level_from_string);
                                }};
    t["scheme.inner_iterations"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                                      const auto n = as_count(k, v);
                                      if (n > 10000) throw ConfigError(k + ": at most 10000");
                                      c.scheme.inner_iterations = static_cast<int>(n);
                                    }};
    t["scheme.inner_tolerance"] = {std::nullopt, THETAFV_DOUBLE(scheme.inner_tolerance)};
    t["scheme.theta_rule"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                                c.scheme.theta_rule = parse_enum(k, v, theta_rule_from_string);
                              }};
    t["scheme.alpha"] = {std::nullopt, THETAFV_DOUBLE(scheme.alpha)};
    t["scheme.frozen_jacobian"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                                     c.scheme.frozen_jacobian = as_bool(k, v);
                                   }};

    t["controller.mode"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                              c.controller.mode = parse_enum(k, v, controller_mode_from_string);
                            }};
    t["controller.cfl"] = {std::nullopt, THETAFV_DOUBLE(controller.cfl)};
    t["controller.start"] = {std::nullopt, THETAFV_DOUBLE(controller.start)};
    t["controller.factor"] = {std::nullopt, THETAFV_DOUBLE(controller.factor)};
    t["controller.cap"] = {std::nullopt, THETAFV_DOUBLE(controller.cap)};
    t["controller.alpha0"] = {std::nullopt, THETAFV_DOUBLE(controller.alpha0)};
    t["controller.local"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                               c.controller.local = as_bool(k, v);
                             }};
    t["controller.convention"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                                    c.controller.convention = parse_enum(k, v, diffusive_convention_from_string);
                                  }};

    t["run.max_iterations"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                                 c.max_iterations = static_cast<std::size_t>(as_count(k, v));
                               }};
    // null means open-ended (march to a steady state)
    t["run.end_time"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                           c.end_time = v.is_null() ? std::numeric_limits<double>::infinity() : as_double(k, v);
                         }};
    t["run.max_retries"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                              const auto n = as_count(k, v);
                              if (n > 60) throw ConfigError(k + ": at most 60");
                              c.max_retries = static_cast<int>(n);
                            }};
    t["run.abs_tol"] = {std::nullopt, THETAFV_DOUBLE(monitor.abs_tol)};
    t["run.rel_tol"] = {std::nullopt, THETAFV_DOUBLE(monitor.rel_tol)};
    t["run.stagnation_window"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                                    c.monitor.window = static_cast<std::size_t>(as_count(k, v));
                                  }};
    t["run.min_improvement"] = {std::nullopt, THETAFV_DOUBLE(monitor.min_improvement)};
    t["run.divergence_factor"] = {std::nullopt, THETAFV_DOUBLE(monitor.divergence_factor)};
    t["run.seed"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) { c.seed = as_count(k, v); }};

    t["output.dir"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                         c.out_dir = as_string(k, v);
                       }};
    t["output.reference"] = {std::nullopt, [](RunConfig& c, const std::string& k, const json& v) {
                               c.write_reference = as_bool(k, v);
                             }};
    return t;
  }();
  return table;
}

#undef THETAFV_DOUBLE

}  // namespace

RunConfig default_config(ProblemKind kind) {
  RunConfig c;
  c.problem = kind;
  switch (kind) {
    case ProblemKind::Diffusion:
      c.grid = {Geometry::Spherical, 1000.0, 1003.0, 180, 1.0};
      c.controller.mode = ControllerMode::Ramp;
      c.controller.start = 0.5;
      c.controller.factor = 1.2;
      c.controller.cap = 1000.0;
      c.monitor.abs_tol = 1e-8;
      break;
    case ProblemKind::Wave:
      c.grid = {Geometry::Spherical, 100.0, 104.0, 200, 1.0};
      c.scheme.theta = 0.5;
      c.scheme.inner_iterations = 2;
      c.controller.mode = ControllerMode::FixedCfl;
      c.controller.cfl = 1.0;
      c.end_time = 1.966;
      c.max_iterations = 1000000;
      break;
    case ProblemKind::FreeFall:
      c.grid = {Geometry::Spherical, 1.0, 100.0, 200, 1.02};
      c.scheme.matrix_level = MatrixLevel::BlockDiagonal;
      c.controller.mode = ControllerMode::Ramp;
      c.controller.start = 0.5;
      c.controller.factor = 1.05;
      c.controller.cap = 20.0;
      c.monitor.rel_tol = 1e-10;
      c.monitor.window = 5000;
      c.max_iterations = 200000;
      break;
  }
  return c;
}

void set_value(RunConfig& config, const std::string& key, const json& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  if (it->second.only && *it->second.only != config.problem) {
    throw ConfigError("key '" + key + "' does not apply to problem '" + to_string(config.problem) + "'");
  }
  it->second.apply(config, key, value);
}

std::vector<std::string> known_keys(ProblemKind kind) {
  std::vector<std::string> keys;
  for (const auto& [key, setter] : setters()) {
    if (!setter.only || *setter.only == kind) keys.push_back(key);
  }
  return keys;
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ProblemKind kind = ProblemKind::Diffusion;
  if (const auto it = doc.find("problem.kind"); it != doc.end()) {
    kind = problem_kind_from_string(as_string("problem.kind", *it));
  }
  RunConfig config = default_config(kind);
  for (const auto& [key, value] : doc.items()) set_value(config, key, value);
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config '" + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

void RunConfig::validate() const {
  try {
    scheme.validate();
    controller.validate();
    (void)make_grid(*this);
    (void)make_problem(*this);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (max_iterations < 1) throw ConfigError("run.max_iterations must be >= 1");
  if (!(end_time > 0.0)) throw ConfigError("run.end_time must be positive");
  if (std::isfinite(end_time) && controller.local) {
    throw ConfigError("local time steps need an open-ended run (run.end_time = null)");
  }
  if (!(monitor.abs_tol >= 0.0) || !(monitor.rel_tol >= 0.0)) throw ConfigError("tolerances must be non-negative");
  if (!(monitor.min_improvement >= 0.0 && monitor.min_improvement < 1.0)) {
    throw ConfigError("run.min_improvement must lie in [0, 1)");
  }
  if (!(monitor.divergence_factor > 1.0)) throw ConfigError("run.divergence_factor must exceed 1");
  if (problem == ProblemKind::Wave && !(wave.velocity > 0.0)) {
    throw ConfigError("problem.velocity must be positive (inflow enters at r_in)");
  }
}

std::unique_ptr<Problem> make_problem(const RunConfig& config) {
  switch (config.problem) {
    case ProblemKind::Diffusion: return std::make_unique<DiffusionProblem>(config.diffusion);
    case ProblemKind::Wave: return std::make_unique<WaveProblem>(config.wave);
    case ProblemKind::FreeFall: return std::make_unique<FreeFallProblem>(config.freefall);
  }
  throw ConfigError("unknown problem");
}

Grid make_grid(const RunConfig& config) {
  const auto& g = config.grid;
  return build_grid(g.geometry, g.r_in, g.r_out, g.cells, g.stretch);
}

MarchOptions make_march_options(const RunConfig& config) {
  MarchOptions o;
  o.scheme = config.scheme;
  o.controller = config.controller;
  o.monitor = config.monitor;
  o.max_iterations = config.max_iterations;
  o.end_time = config.end_time;
  o.max_retries = config.max_retries;
  return o;
}

}  // namespace thetafv::app
