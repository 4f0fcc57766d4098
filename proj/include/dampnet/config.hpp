#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "dampnet/experiment.hpp"

namespace dampnet {

// Scenario files are JSON with four sections:
//
//   {
//     "network":    {"nodes": [{"id", "kind"}], "arcs": [{"id", "tail", "head", "length",
//                    "velocity", "damping_factor", "damping"}]},
//     "demands":    [{"node", "kappa", "theta", "sigma", "d0"}],
//     "numerics":   {"t0", "T", "sde_dt", "pde_dx", "initial_data": "warm"|"zero"},
//     "experiment": {"update_times" | "equidistant_updates", "monte_carlo_runs", "master_seed",
//                    "workers", "damping_variants": [{"label", "damping"}]}
//   }
//
// A time function is a number or {"constant", "terms": [{"amplitude",
// "angular_factor", "phase"}], "steps": [{"at", "delta"}]}; angular_factor
// multiplies π. A damping shape is {"kind": "none"} or {"kind": "monomial",
// "degree", "coefficient"} with the coefficient defaulting to the reference
// value for degrees 1..4. Unknown keys are rejected.

using Json = nlohmann::json;

TimeFunction time_function_from_json(const Json& j, const std::string& where = "time function");
Json to_json(const TimeFunction& f);

DampingShape damping_from_json(const Json& j, const std::string& where = "damping");
Json to_json(const DampingShape& shape);

ScenarioConfig config_from_json(const Json& j);
Json to_json(const ScenarioConfig& config);

/// Reads and parses a scenario file; IoError when it cannot be read,
/// SchemaError on malformed content.
ScenarioConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical (sorted-key) JSON serialization.
std::uint64_t config_hash(const ScenarioConfig& config);

}  // namespace dampnet
