#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "pnp/engine.hpp"
#include "pnp/geometry.hpp"

namespace pnp::scenario {

using geo::Point;

enum class Distribution { UniformRandom, Cluster, BoundaryCluster };

struct ScenarioConfig {
    geo::Polygon aoi;
    int n_sensors = 0;
    double r_s = 5.0;
    double r_tx = 11.0;
    double speed = 1.0;
    Distribution distribution = Distribution::UniformRandom;
    Point cluster_center{};
    double cluster_radius = 10.0;
    std::string boundary_edge = "left";  // left/right/bottom/top
    double boundary_depth = 10.0;
    engine::MediumParams medium;
    engine::EnergyParams energy;
    double delta_sub = 500.0;
    std::vector<std::pair<int, double>> failures;
    double max_time = 2000.0;
    double snapshot_interval = 5.0;
    // Must exceed the longest dormant timer a sensor can arm (hole-retry
    // periods grow with the search horizon), or a paused-but-live run would be
    // mistaken for a finished one.
    double quiescence_window = 150.0;
    double coverage_resolution = 0.25;
    double coverage_threshold = 0.99;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;  // filled during validation
};

/// Load and validate a JSON config file. Unknown keys and invariant
/// violations are errors; soft issues (connectivity margin) become warnings.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);

/// Built-in presets: random80, boundary80, center80, narrows.
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Deterministic initial placement: (id, position, energy) per sensor.
std::vector<std::tuple<int, Point, double>> generate_initial(const ScenarioConfig& cfg,
                                                             std::uint64_t seed);

engine::EngineConfig to_engine_config(const ScenarioConfig& cfg, std::uint64_t seed);

/// Build an engine, place sensors, schedule starters, run.
trace::Trace run_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace pnp::scenario
