#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quakesense/feed.hpp"
#include "quakesense/ingest.hpp"
#include "quakesense/metrics.hpp"
#include "quakesense/world.hpp"

namespace quakesense {

struct BotFleetConfig {
    int count = 2;
    int max_sends = 10;
    double window_s = 900.0;
    // Questions still unsent this long after dispatch starts are dropped as
    // expired; this is what caps sends for high-volume events.
    double staleness_s = 3600.0;
};

struct ModelPaths {
    std::string relevance;
    std::string damage_presence;
    std::string damage_info;
    std::string witness_scorer;
    std::string witness_centroid;
    // overrides for the thresholds stored inside the model files
    std::optional<double> relevance_threshold;
    std::optional<double> damage_presence_threshold;
    std::optional<double> damage_info_threshold;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    EarthquakeEvent event;
    std::size_t population = 0;
    double felt_r0 = 0.5;
    double felt_c = 0.45;
    double p_post = 0.30;
    double p_geotag = 0.02;  // OSN geotag prevalence sits in the low percents
    double p_reply = 0.80;
    double p_collaborative = 0.90;
    double latency_mu_log = 1.48;
    double latency_sigma_log = 0.50;
    std::vector<std::string> keywords;        // filled with defaults at parse
    double collect_geotag_radius_km = 0.0;    // 0 = keyword criterion only
    CrawlLimit crawl;                         // max_messages 0 = uncapped
    BotFleetConfig bots;
    std::size_t contact_budget = 200;
    ModelPaths models;
    std::string gazetteer_path;
    ArchetypeMix mix;
    ReplyEnrichment enrichment;
    double text_noise = 0.15;
    double time_window_s = 3600.0;
    double grid_cell_deg = 0.25;
    VarietyMode variety_mode = VarietyMode::per_message;
    CollabMode collab_mode = CollabMode::simulation;
};

// Strict parse: unknown keys anywhere in the document are ConfigErrors, as are
// type mismatches and out-of-range values. Relative paths (models, gazetteer,
// feed) resolve against base_dir. `seed` is required and has no default.
ScenarioConfig parse_scenario_config(const std::string& json_text, const std::string& base_dir);

// Reads the file and parses with base_dir = the file's directory.
ScenarioConfig load_scenario_config(const std::string& path);

// Range checks shared by parse and by programmatic construction.
void validate_scenario_config(const ScenarioConfig& config);

// Serialization used to emit the bundled scenario files; paths are written as
// given (the fixture writer passes relative ones).
std::string scenario_to_json(const ScenarioConfig& config);

CollectionFilter scenario_filter(const ScenarioConfig& config);
WorldConfig scenario_world_config(const ScenarioConfig& config);

}  // namespace quakesense
