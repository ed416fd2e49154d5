#pragma once
// Batch commands behind the anosovlab tool. Each one reads a RunConfig,
// writes JSON/CSV files into cfg.out_dir and returns the main report.
#include <json.hpp>

#include <string>

#include "anosov/cocycle.hpp"
#include "anosov/config.hpp"
#include "anosov/gulliver.hpp"

namespace anosov {

nlohmann::json cmd_pestov(const RunConfig& cfg);
nlohmann::json cmd_terminator(const RunConfig& cfg);
nlohmann::json cmd_anosov(const RunConfig& cfg);
nlohmann::json cmd_xray(const RunConfig& cfg);
nlohmann::json cmd_invariant(const RunConfig& cfg);
nlohmann::json cmd_gulliver(const RunConfig& cfg);

// dispatch by name; throws ConfigError for an unknown command
nlohmann::json run_command(const std::string& name, const RunConfig& cfg);

nlohmann::json to_json(const TerminatorCertificate& c);
nlohmann::json to_json(const GulliverParams& p);
nlohmann::json to_json(const Feasibility& f);
nlohmann::json to_json(const TrappingReport& t);

}  // namespace anosov
