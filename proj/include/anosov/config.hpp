#pragma once
// Run configuration for the command-line tool: JSON parsing, surface
// specs, the config hash and exit-code carrying errors.
#include <json.hpp>

#include <stdexcept>
#include <string>

#include "anosov/geometry.hpp"

namespace anosov {

inline constexpr const char* kToolVersion = "anosovlab 0.1.0";

// errors mapped to process exit codes
struct ToolError : std::runtime_error {
  int code;
  ToolError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};
struct ConfigError : ToolError {
  explicit ConfigError(const std::string& w) : ToolError(2, w) {}
};
struct InsufficientData : ToolError {
  explicit InsufficientData(const std::string& w) : ToolError(3, w) {}
};
struct SolverFailure : ToolError {
  explicit SolverFailure(const std::string& w) : ToolError(4, w) {}
};

struct RunConfig {
  nlohmann::json doc;  // full document, after command-line overrides
  std::string hash;    // FNV-1a of the canonical dump, 16 hex digits
  unsigned long long seed = 1;
  int workers = 1;
  std::string out_dir = ".";

  // typed access with defaults; throws ConfigError on a wrong type
  double num(const std::string& key, double def) const;
  int integer(const std::string& key, int def) const;
  std::string str(const std::string& key, const std::string& def) const;
  // positive number, ConfigError otherwise
  double tolerance(const std::string& key, double def) const;
};

std::string config_hash(const nlohmann::json& doc);

// seed/workers/out from the document unless overridden (negative = keep)
RunConfig make_config(nlohmann::json doc, long long seed_override = -1, int workers_override = -1,
                      const std::string& out_override = "");
RunConfig load_config(const std::string& path, long long seed_override = -1,
                      int workers_override = -1, const std::string& out_override = "");

// {"type":"conformal_torus","Lx","Ly","nx","ny","lambda": expr or rows},
// {"type":"constant","K"}, {"type":"octagon"}
SurfaceModel parse_surface(const nlohmann::json& spec);
std::string surface_type(const nlohmann::json& spec);

}  // namespace anosov
