#pragma once

// JSON documents: the run configuration and stream-bump test fields.

#include <string>

#include <json.hpp>

#include "vsheet/euler.hpp"
#include "vsheet/moments.hpp"
#include "vsheet/quadrature.hpp"

namespace vsheet {

/// Everything a command can be tuned by.
struct RunConfig {
  quad::QuadConfig quad;
  SeriesOptions series;
};

/// Flat object with any of the keys abs_tol, rel_tol, max_subdivisions,
/// excision_schedule, tail_cutoff, period_panels, parallel,
/// truncation_order, series_tolerance. Unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

/// {center: [x, y], radius, amplitude, profile: {type: polynomial|exponential, order}}
StreamBump stream_bump_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const StreamBump& bump);
StreamBump load_stream_bump(const std::string& path);

}  // namespace vsheet
