#include "quakesense/scenario.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"
#include "quakesense/errors.hpp"

namespace quakesense {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string resolve_path(const std::string& raw, const std::string& base_dir) {
    if (raw.empty()) return raw;
    std::filesystem::path p(raw);
    if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError(std::string("unknown key \"") + it.key() + "\" in " + where);
        }
    }
}

const json& require(const json& obj, const char* key, const char* where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(std::string("missing required key \"") + key + "\" in " + where);
    }
    return *it;
}

double as_number(const json& value, const char* name) {
    if (!value.is_number()) {
        throw ConfigError(std::string(name) + " must be a number");
    }
    return value.get<double>();
}

std::string as_string(const json& value, const char* name) {
    if (!value.is_string()) {
        throw ConfigError(std::string(name) + " must be a string");
    }
    return value.get<std::string>();
}

std::uint64_t as_u64(const json& value, const char* name) {
    if (!value.is_number_integer() ||
        (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
        throw ConfigError(std::string(name) + " must be a non-negative integer");
    }
    return value.get<std::uint64_t>();
}

std::size_t as_count(const json& value, const char* name) {
    return static_cast<std::size_t>(as_u64(value, name));
}

double opt_number(const json& obj, const char* key, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return as_number(*it, key);
}

EarthquakeEvent event_from_feed_file(const json& obj, const std::string& base_dir) {
    check_keys(obj, "event", {"feed", "min_magnitude"});
    std::string path = resolve_path(as_string(require(obj, "feed", "event"), "event.feed"), base_dir);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open feed file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    double min_mag = opt_number(obj, "min_magnitude", kDefaultMinMagnitude);
    std::vector<EarthquakeEvent> events = parse_usgs_feed(buf.str());
    for (const EarthquakeEvent& ev : events) {
        if (should_trigger(ev, min_mag)) return ev;
    }
    throw ConfigError("no event in " + path + " reaches magnitude " + std::to_string(min_mag));
}

EarthquakeEvent parse_event(const json& obj, const std::string& base_dir) {
    if (!obj.is_object()) {
        throw ConfigError("event must be an object");
    }
    if (obj.contains("feed")) {
        return event_from_feed_file(obj, base_dir);
    }
    check_keys(obj, "event",
               {"event_id", "magnitude", "depth_km", "lat", "lon", "origin_time_ms", "place"});
    EarthquakeEvent ev;
    ev.event_id = as_string(require(obj, "event_id", "event"), "event.event_id");
    ev.magnitude = as_number(require(obj, "magnitude", "event"), "event.magnitude");
    ev.depth_km = as_number(require(obj, "depth_km", "event"), "event.depth_km");
    ev.epicenter.lat = as_number(require(obj, "lat", "event"), "event.lat");
    ev.epicenter.lon = as_number(require(obj, "lon", "event"), "event.lon");
    if (obj.contains("origin_time_ms")) {
        ev.origin_time_ms = static_cast<std::int64_t>(as_number(obj.at("origin_time_ms"), "event.origin_time_ms"));
    }
    if (obj.contains("place")) {
        ev.place_name = as_string(obj.at("place"), "event.place");
    }
    return ev;
}

void parse_probabilities(const json& obj, ScenarioConfig& out) {
    check_keys(obj, "probabilities", {"p_post", "p_geotag", "p_reply", "p_collaborative"});
    out.p_post = opt_number(obj, "p_post", out.p_post);
    out.p_geotag = opt_number(obj, "p_geotag", out.p_geotag);
    out.p_reply = opt_number(obj, "p_reply", out.p_reply);
    out.p_collaborative = opt_number(obj, "p_collaborative", out.p_collaborative);
}

void parse_models(const json& obj, ScenarioConfig& out, const std::string& base_dir) {
    check_keys(obj, "models",
               {"relevance", "damage_presence", "damage_info", "witness_scorer",
                "witness_centroid", "relevance_threshold", "damage_presence_threshold",
                "damage_info_threshold"});
    ModelPaths& m = out.models;
    m.relevance = resolve_path(as_string(require(obj, "relevance", "models"), "models.relevance"), base_dir);
    m.damage_presence = resolve_path(
        as_string(require(obj, "damage_presence", "models"), "models.damage_presence"), base_dir);
    m.damage_info = resolve_path(
        as_string(require(obj, "damage_info", "models"), "models.damage_info"), base_dir);
    m.witness_scorer = resolve_path(
        as_string(require(obj, "witness_scorer", "models"), "models.witness_scorer"), base_dir);
    m.witness_centroid = resolve_path(
        as_string(require(obj, "witness_centroid", "models"), "models.witness_centroid"), base_dir);
    if (obj.contains("relevance_threshold")) {
        m.relevance_threshold = as_number(obj.at("relevance_threshold"), "models.relevance_threshold");
    }
    if (obj.contains("damage_presence_threshold")) {
        m.damage_presence_threshold =
            as_number(obj.at("damage_presence_threshold"), "models.damage_presence_threshold");
    }
    if (obj.contains("damage_info_threshold")) {
        m.damage_info_threshold = as_number(obj.at("damage_info_threshold"), "models.damage_info_threshold");
    }
}

std::string lowercase_ascii(std::string text) {
    for (char& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return text;
}

void expect_probability(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ConfigError(std::string(name) + " must be in [0, 1]");
    }
}

void expect_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string(name) + " must be positive and finite");
    }
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& json_text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("scenario config must be a JSON object");
    }
    check_keys(doc, "scenario config",
               {"seed", "event", "population", "felt_radius", "probabilities", "latency",
                "keywords", "collect", "crawl_limit", "bots", "contact_budget", "models",
                "gazetteer", "archetype_mix", "reply_enrichment", "text_noise", "time_window_s",
                "grid_cell_deg", "variety_mode", "collaborative_mode"});

    ScenarioConfig out;
    out.seed = as_u64(require(doc, "seed", "scenario config"), "seed");
    out.event = parse_event(require(doc, "event", "scenario config"), base_dir);
    out.population = as_count(require(doc, "population", "scenario config"), "population");
    out.gazetteer_path = resolve_path(
        as_string(require(doc, "gazetteer", "scenario config"), "gazetteer"), base_dir);
    parse_models(require(doc, "models", "scenario config"), out, base_dir);

    if (doc.contains("felt_radius")) {
        const json& fr = doc.at("felt_radius");
        check_keys(fr, "felt_radius", {"r0", "c"});
        out.felt_r0 = opt_number(fr, "r0", out.felt_r0);
        out.felt_c = opt_number(fr, "c", out.felt_c);
    }
    if (doc.contains("probabilities")) {
        parse_probabilities(doc.at("probabilities"), out);
    }
    if (doc.contains("latency")) {
        const json& lat = doc.at("latency");
        check_keys(lat, "latency", {"mu_log", "sigma_log"});
        out.latency_mu_log = opt_number(lat, "mu_log", out.latency_mu_log);
        out.latency_sigma_log = opt_number(lat, "sigma_log", out.latency_sigma_log);
    }
    if (doc.contains("keywords")) {
        const json& kw = doc.at("keywords");
        if (!kw.is_array()) throw ConfigError("keywords must be an array of strings");
        for (const json& item : kw) {
            out.keywords.push_back(lowercase_ascii(as_string(item, "keywords[]")));
        }
    } else {
        out.keywords = default_keywords();
    }
    if (doc.contains("collect")) {
        const json& col = doc.at("collect");
        check_keys(col, "collect", {"geotag_radius_km"});
        out.collect_geotag_radius_km = opt_number(col, "geotag_radius_km", 0.0);
    }
    if (doc.contains("crawl_limit")) {
        const json& cl = doc.at("crawl_limit");
        check_keys(cl, "crawl_limit", {"max_messages", "window_s"});
        out.crawl.max_messages = as_count(require(cl, "max_messages", "crawl_limit"), "crawl_limit.max_messages");
        double window_s = opt_number(cl, "window_s", 60.0);
        expect_positive(window_s, "crawl_limit.window_s");
        out.crawl.window_ms = static_cast<std::int64_t>(std::llround(window_s * 1000.0));
    }
    if (doc.contains("bots")) {
        const json& b = doc.at("bots");
        check_keys(b, "bots", {"count", "max_sends", "window_s", "staleness_s"});
        out.bots.count = static_cast<int>(as_u64(require(b, "count", "bots"), "bots.count"));
        out.bots.max_sends = static_cast<int>(as_u64(require(b, "max_sends", "bots"), "bots.max_sends"));
        out.bots.window_s = opt_number(b, "window_s", out.bots.window_s);
        out.bots.staleness_s = opt_number(b, "staleness_s", out.bots.staleness_s);
    }
    if (doc.contains("contact_budget")) {
        out.contact_budget = as_count(doc.at("contact_budget"), "contact_budget");
    }
    if (doc.contains("archetype_mix")) {
        const json& mix = doc.at("archetype_mix");
        check_keys(mix, "archetype_mix", {"witness", "sympathizer", "keyword_noise"});
        out.mix.witness = opt_number(mix, "witness", out.mix.witness);
        out.mix.sympathizer = opt_number(mix, "sympathizer", out.mix.sympathizer);
        out.mix.keyword_noise = opt_number(mix, "keyword_noise", out.mix.keyword_noise);
    }
    if (doc.contains("reply_enrichment")) {
        const json& enr = doc.at("reply_enrichment");
        check_keys(enr, "reply_enrichment",
                   {"place_density_factor", "building_boost", "damage_present_frac"});
        out.enrichment.place_density_factor =
            opt_number(enr, "place_density_factor", out.enrichment.place_density_factor);
        out.enrichment.building_boost = opt_number(enr, "building_boost", out.enrichment.building_boost);
        out.enrichment.damage_present_frac =
            opt_number(enr, "damage_present_frac", out.enrichment.damage_present_frac);
    }
    out.text_noise = opt_number(doc, "text_noise", out.text_noise);
    out.time_window_s = opt_number(doc, "time_window_s", out.time_window_s);
    out.grid_cell_deg = opt_number(doc, "grid_cell_deg", out.grid_cell_deg);
    if (doc.contains("variety_mode")) {
        std::string mode = as_string(doc.at("variety_mode"), "variety_mode");
        if (mode == "per_message") {
            out.variety_mode = VarietyMode::per_message;
        } else if (mode == "event_level") {
            out.variety_mode = VarietyMode::event_level;
        } else {
            throw ConfigError("variety_mode must be \"per_message\" or \"event_level\"");
        }
    }
    if (doc.contains("collaborative_mode")) {
        std::string mode = as_string(doc.at("collaborative_mode"), "collaborative_mode");
        if (mode == "simulation") {
            out.collab_mode = CollabMode::simulation;
        } else if (mode == "evaluation") {
            out.collab_mode = CollabMode::evaluation;
        } else {
            throw ConfigError("collaborative_mode must be \"simulation\" or \"evaluation\"");
        }
    }

    validate_scenario_config(out);
    return out;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open scenario config: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string base_dir = std::filesystem::path(path).parent_path().string();
    return parse_scenario_config(buf.str(), base_dir);
}

void validate_scenario_config(const ScenarioConfig& config) {
    try {
        validate_event(config.event, "scenario event");
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    expect_positive(config.felt_r0, "felt_radius.r0");
    expect_positive(config.felt_c, "felt_radius.c");
    expect_probability(config.p_post, "probabilities.p_post");
    expect_probability(config.p_geotag, "probabilities.p_geotag");
    expect_probability(config.p_reply, "probabilities.p_reply");
    expect_probability(config.p_collaborative, "probabilities.p_collaborative");
    if (!std::isfinite(config.latency_mu_log)) {
        throw ConfigError("latency.mu_log must be finite");
    }
    expect_positive(config.latency_sigma_log, "latency.sigma_log");
    if (config.keywords.empty() && config.collect_geotag_radius_km <= 0.0) {
        throw ConfigError("collection needs keywords or a positive geotag radius");
    }
    for (const std::string& kw : config.keywords) {
        if (kw.empty()) throw ConfigError("keywords must be non-empty");
    }
    if (config.collect_geotag_radius_km < 0.0) {
        throw ConfigError("collect.geotag_radius_km must be >= 0");
    }
    if (config.crawl.max_messages > 0 && config.crawl.window_ms <= 0) {
        throw ConfigError("crawl_limit.window_s must be positive when a cap is set");
    }
    if (config.bots.count < 1) throw ConfigError("bots.count must be >= 1");
    if (config.bots.max_sends < 1) throw ConfigError("bots.max_sends must be >= 1");
    expect_positive(config.bots.window_s, "bots.window_s");
    expect_positive(config.bots.staleness_s, "bots.staleness_s");
    if (config.models.relevance.empty() || config.models.damage_presence.empty() ||
        config.models.damage_info.empty() || config.models.witness_scorer.empty() ||
        config.models.witness_centroid.empty()) {
        throw ConfigError("all five model paths are required");
    }
    auto check_threshold = [](const std::optional<double>& value, const char* name) {
        if (value && !(*value >= 0.0 && *value <= 1.0)) {
            throw ConfigError(std::string(name) + " must be in [0, 1]");
        }
    };
    check_threshold(config.models.relevance_threshold, "models.relevance_threshold");
    check_threshold(config.models.damage_presence_threshold, "models.damage_presence_threshold");
    check_threshold(config.models.damage_info_threshold, "models.damage_info_threshold");
    if (config.gazetteer_path.empty()) {
        throw ConfigError("gazetteer path is required");
    }
    expect_probability(config.mix.witness, "archetype_mix.witness");
    expect_probability(config.mix.sympathizer, "archetype_mix.sympathizer");
    expect_probability(config.mix.keyword_noise, "archetype_mix.keyword_noise");
    if (config.mix.witness + config.mix.sympathizer + config.mix.keyword_noise > 1.0 + 1e-12) {
        throw ConfigError("archetype_mix shares must sum to at most 1");
    }
    expect_positive(config.enrichment.place_density_factor, "reply_enrichment.place_density_factor");
    expect_positive(config.enrichment.building_boost, "reply_enrichment.building_boost");
    expect_probability(config.enrichment.damage_present_frac, "reply_enrichment.damage_present_frac");
    expect_probability(config.text_noise, "text_noise");
    expect_positive(config.time_window_s, "time_window_s");
    expect_positive(config.grid_cell_deg, "grid_cell_deg");
}

std::string scenario_to_json(const ScenarioConfig& config) {
    ordered_json doc;
    doc["seed"] = config.seed;
    doc["event"] = {
        {"event_id", config.event.event_id}, {"magnitude", config.event.magnitude},
        {"depth_km", config.event.depth_km}, {"lat", config.event.epicenter.lat},
        {"lon", config.event.epicenter.lon}, {"origin_time_ms", config.event.origin_time_ms},
        {"place", config.event.place_name},
    };
    doc["population"] = config.population;
    doc["felt_radius"] = {{"r0", config.felt_r0}, {"c", config.felt_c}};
    doc["probabilities"] = {
        {"p_post", config.p_post},
        {"p_geotag", config.p_geotag},
        {"p_reply", config.p_reply},
        {"p_collaborative", config.p_collaborative},
    };
    doc["latency"] = {{"mu_log", config.latency_mu_log}, {"sigma_log", config.latency_sigma_log}};
    doc["keywords"] = config.keywords;
    if (config.collect_geotag_radius_km > 0.0) {
        doc["collect"] = {{"geotag_radius_km", config.collect_geotag_radius_km}};
    }
    if (config.crawl.max_messages > 0) {
        doc["crawl_limit"] = {
            {"max_messages", config.crawl.max_messages},
            {"window_s", static_cast<double>(config.crawl.window_ms) / 1000.0},
        };
    }
    doc["bots"] = {
        {"count", config.bots.count},
        {"max_sends", config.bots.max_sends},
        {"window_s", config.bots.window_s},
        {"staleness_s", config.bots.staleness_s},
    };
    doc["contact_budget"] = config.contact_budget;
    ordered_json models;
    models["relevance"] = config.models.relevance;
    models["damage_presence"] = config.models.damage_presence;
    models["damage_info"] = config.models.damage_info;
    models["witness_scorer"] = config.models.witness_scorer;
    models["witness_centroid"] = config.models.witness_centroid;
    if (config.models.relevance_threshold) {
        models["relevance_threshold"] = *config.models.relevance_threshold;
    }
    if (config.models.damage_presence_threshold) {
        models["damage_presence_threshold"] = *config.models.damage_presence_threshold;
    }
    if (config.models.damage_info_threshold) {
        models["damage_info_threshold"] = *config.models.damage_info_threshold;
    }
    doc["models"] = std::move(models);
    doc["gazetteer"] = config.gazetteer_path;
    doc["archetype_mix"] = {
        {"witness", config.mix.witness},
        {"sympathizer", config.mix.sympathizer},
        {"keyword_noise", config.mix.keyword_noise},
    };
    doc["reply_enrichment"] = {
        {"place_density_factor", config.enrichment.place_density_factor},
        {"building_boost", config.enrichment.building_boost},
        {"damage_present_frac", config.enrichment.damage_present_frac},
    };
    doc["text_noise"] = config.text_noise;
    doc["time_window_s"] = config.time_window_s;
    doc["grid_cell_deg"] = config.grid_cell_deg;
    doc["variety_mode"] =
        config.variety_mode == VarietyMode::per_message ? "per_message" : "event_level";
    doc["collaborative_mode"] =
        config.collab_mode == CollabMode::simulation ? "simulation" : "evaluation";
    return doc.dump(2) + "\n";
}

CollectionFilter scenario_filter(const ScenarioConfig& config) {
    CollectionFilter filter;
    filter.keywords = config.keywords;
    filter.match_geotagged_in_radius = config.collect_geotag_radius_km > 0.0;
    filter.radius_km = config.collect_geotag_radius_km;
    validate_filter(filter);
    return filter;
}

WorldConfig scenario_world_config(const ScenarioConfig& config) {
    WorldConfig wc;
    wc.population = config.population;
    wc.p_post = config.p_post;
    wc.p_geotag = config.p_geotag;
    wc.p_reply = config.p_reply;
    wc.p_collaborative = config.p_collaborative;
    wc.latency_mu_log = config.latency_mu_log;
    wc.latency_sigma_log = config.latency_sigma_log;
    wc.felt_r0 = config.felt_r0;
    wc.felt_c = config.felt_c;
    wc.mix = config.mix;
    wc.noise = config.text_noise;
    wc.time_window_ms = static_cast<std::int64_t>(std::llround(config.time_window_s * 1000.0));
    wc.enrichment = config.enrichment;
    validate_world_config(wc);
    return wc;
}

}  // namespace quakesense
