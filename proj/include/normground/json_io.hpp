#pragma once

#include "normground/params.hpp"
#include "normground/solver.hpp"

#include <json.hpp>

#include <string>

namespace normground {

/// Strict parse of the params object: exactly the documented field names,
/// unknown keys are an error.  Validates the result.
ProblemParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ProblemParams& p);

struct GridConfig {
  double R_max = 40.0;
  int n = 4096;
};

/// Full run configuration: {"params": {...}, "grid": {...}, "solver": {...}};
/// grid and solver sections are optional, unknown keys anywhere are errors.
struct RunConfig {
  ProblemParams params;
  GridConfig grid;
  SolverConfig solver;
};

RunConfig run_config_from_json(const nlohmann::json& j);

nlohmann::json fiber_report_to_json(const FiberReport& rep);
nlohmann::json result_to_json(const GroundStateResult& res, const ProblemParams& params,
                              const GridConfig& grid, const SolverConfig& solver,
                              const std::string& profile_csv);
nlohmann::json sweep_table_to_json(const SweepTable& table);

/// FNV-1a 64-bit content hash, hex-encoded; deterministic for identical bytes.
std::string content_hash(const std::string& bytes);

}  // namespace normground
