#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "quakesense/errors.hpp"
#include "quakesense/ingest.hpp"
#include "quakesense/scenario.hpp"

using namespace quakesense;
namespace fs = std::filesystem;

namespace {

// Every key the parser accepts, with values distinct from the defaults.
const char* kFullConfig = R"({
  "seed": 42,
  "event": {
    "event_id": "ev-test",
    "magnitude": 6.1,
    "depth_km": 15.0,
    "lat": 28.15,
    "lon": 84.45,
    "origin_time_ms": 1429900000000,
    "place": "somewhere remote"
  },
  "population": 5000,
  "felt_radius": {"r0": 0.6, "c": 0.5},
  "probabilities": {"p_post": 0.4, "p_geotag": 0.05, "p_reply": 0.7, "p_collaborative": 0.85},
  "latency": {"mu_log": 2.0, "sigma_log": 0.6},
  "keywords": ["Earthquake", "TEMBLOR"],
  "collect": {"geotag_radius_km": 30.0},
  "crawl_limit": {"max_messages": 50, "window_s": 2.5},
  "bots": {"count": 3, "max_sends": 7, "window_s": 600.0, "staleness_s": 1800.0},
  "contact_budget": 120,
  "models": {
    "relevance": "models/relevance.json",
    "damage_presence": "models/damage_presence.json",
    "damage_info": "models/damage_info.json",
    "witness_scorer": "models/witness.json",
    "witness_centroid": "models/centroid.json",
    "relevance_threshold": 0.6
  },
  "gazetteer": "data/places.tsv",
  "archetype_mix": {"witness": 0.1, "sympathizer": 0.2, "keyword_noise": 0.3},
  "reply_enrichment": {"place_density_factor": 3.0, "building_boost": 5.0, "damage_present_frac": 0.4},
  "text_noise": 0.2,
  "time_window_s": 1200.0,
  "grid_cell_deg": 0.5,
  "variety_mode": "event_level",
  "collaborative_mode": "evaluation"
})";

// Smallest config the parser accepts.
std::string minimal_config() {
    return R"({
      "seed": 7,
      "event": {"event_id": "e1", "magnitude": 5.0, "depth_km": 10.0, "lat": 1.0, "lon": 2.0,
                "origin_time_ms": 1000},
      "population": 100,
      "models": {
        "relevance": "a.json", "damage_presence": "b.json", "damage_info": "c.json",
        "witness_scorer": "d.json", "witness_centroid": "e.json"
      },
      "gazetteer": "g.tsv"
    })";
}

// Returns the same document with one "key": value pair injected into the
// object opened by `anchor`.
std::string with_injected(const std::string& doc, const std::string& anchor,
                          const std::string& injected) {
    const auto pos = doc.find(anchor);
    REQUIRE(pos != std::string::npos);
    const auto brace = doc.find('{', pos);
    REQUIRE(brace != std::string::npos);
    std::string out = doc;
    out.insert(brace + 1, injected + ", ");
    return out;
}

}  // namespace

TEST_CASE("full config parses into the right fields") {
    const ScenarioConfig cfg = parse_scenario_config(kFullConfig, "/base");

    CHECK(cfg.seed == 42);
    CHECK(cfg.event.event_id == "ev-test");
    CHECK(cfg.event.magnitude == doctest::Approx(6.1));
    CHECK(cfg.event.depth_km == doctest::Approx(15.0));
    CHECK(cfg.event.epicenter.lat == doctest::Approx(28.15));
    CHECK(cfg.event.epicenter.lon == doctest::Approx(84.45));
    CHECK(cfg.event.origin_time_ms == 1429900000000);
    CHECK(cfg.event.place_name == "somewhere remote");
    CHECK(cfg.population == 5000);
    CHECK(cfg.felt_r0 == doctest::Approx(0.6));
    CHECK(cfg.felt_c == doctest::Approx(0.5));
    CHECK(cfg.p_post == doctest::Approx(0.4));
    CHECK(cfg.p_geotag == doctest::Approx(0.05));
    CHECK(cfg.p_reply == doctest::Approx(0.7));
    CHECK(cfg.p_collaborative == doctest::Approx(0.85));
    CHECK(cfg.latency_mu_log == doctest::Approx(2.0));
    CHECK(cfg.latency_sigma_log == doctest::Approx(0.6));
    // keywords normalize to lowercase at parse
    REQUIRE(cfg.keywords.size() == 2);
    CHECK(cfg.keywords[0] == "earthquake");
    CHECK(cfg.keywords[1] == "temblor");
    CHECK(cfg.collect_geotag_radius_km == doctest::Approx(30.0));
    CHECK(cfg.crawl.max_messages == 50);
    CHECK(cfg.crawl.window_ms == 2500);
    CHECK(cfg.bots.count == 3);
    CHECK(cfg.bots.max_sends == 7);
    CHECK(cfg.bots.window_s == doctest::Approx(600.0));
    CHECK(cfg.bots.staleness_s == doctest::Approx(1800.0));
    CHECK(cfg.contact_budget == 120);
    CHECK(cfg.models.relevance == "/base/models/relevance.json");
    CHECK(cfg.models.witness_centroid == "/base/models/centroid.json");
    REQUIRE(cfg.models.relevance_threshold.has_value());
    CHECK(*cfg.models.relevance_threshold == doctest::Approx(0.6));
    CHECK_FALSE(cfg.models.damage_presence_threshold.has_value());
    CHECK(cfg.gazetteer_path == "/base/data/places.tsv");
    CHECK(cfg.mix.witness == doctest::Approx(0.1));
    CHECK(cfg.mix.sympathizer == doctest::Approx(0.2));
    CHECK(cfg.mix.keyword_noise == doctest::Approx(0.3));
    CHECK(cfg.enrichment.place_density_factor == doctest::Approx(3.0));
    CHECK(cfg.enrichment.building_boost == doctest::Approx(5.0));
    CHECK(cfg.enrichment.damage_present_frac == doctest::Approx(0.4));
    CHECK(cfg.text_noise == doctest::Approx(0.2));
    CHECK(cfg.time_window_s == doctest::Approx(1200.0));
    CHECK(cfg.grid_cell_deg == doctest::Approx(0.5));
    CHECK(cfg.variety_mode == VarietyMode::event_level);
    CHECK(cfg.collab_mode == CollabMode::evaluation);
}

TEST_CASE("absolute paths pass through untouched") {
    std::string doc = kFullConfig;
    const std::string needle = "\"gazetteer\": \"data/places.tsv\"";
    doc.replace(doc.find(needle), needle.size(), "\"gazetteer\": \"/elsewhere/places.tsv\"");
    const ScenarioConfig cfg = parse_scenario_config(doc, "/base");
    CHECK(cfg.gazetteer_path == "/elsewhere/places.tsv");
}

TEST_CASE("omitted keys fall back to defaults") {
    const ScenarioConfig cfg = parse_scenario_config(minimal_config(), "");

    CHECK(cfg.keywords == default_keywords());
    CHECK(cfg.felt_r0 == doctest::Approx(0.5));
    CHECK(cfg.felt_c == doctest::Approx(0.45));
    CHECK(cfg.p_post == doctest::Approx(0.30));
    CHECK(cfg.p_geotag == doctest::Approx(0.02));
    CHECK(cfg.p_reply == doctest::Approx(0.80));
    CHECK(cfg.p_collaborative == doctest::Approx(0.90));
    CHECK(cfg.collect_geotag_radius_km == doctest::Approx(0.0));
    CHECK(cfg.crawl.max_messages == 0);
    CHECK(cfg.bots.count == 2);
    CHECK(cfg.bots.max_sends == 10);
    CHECK(cfg.contact_budget == 200);
    CHECK(cfg.text_noise == doctest::Approx(0.15));
    CHECK(cfg.time_window_s == doctest::Approx(3600.0));
    CHECK(cfg.grid_cell_deg == doctest::Approx(0.25));
    CHECK(cfg.variety_mode == VarietyMode::per_message);
    CHECK(cfg.collab_mode == CollabMode::simulation);
    CHECK(cfg.models.relevance == "a.json");
}

TEST_CASE("unknown keys are rejected everywhere") {
    const std::string base = minimal_config();

    std::string top_level = base;
    top_level.insert(top_level.find('{') + 1, "\"surprise\": 1, ");
    CHECK_THROWS_AS(parse_scenario_config(top_level, ""), ConfigError);
    CHECK_THROWS_AS(
        parse_scenario_config(with_injected(base, "\"event\":", "\"depth\": 1"), ""),
        ConfigError);
    CHECK_THROWS_AS(
        parse_scenario_config(with_injected(base, "\"models\":", "\"extra_model\": \"x\""), ""),
        ConfigError);

    const std::string full = kFullConfig;
    for (const char* anchor :
         {"\"felt_radius\":", "\"probabilities\":", "\"latency\":", "\"collect\":",
          "\"crawl_limit\":", "\"bots\":", "\"archetype_mix\":", "\"reply_enrichment\":"}) {
        CAPTURE(anchor);
        CHECK_THROWS_AS(
            parse_scenario_config(with_injected(full, anchor, "\"typo_key\": 1"), "/base"),
            ConfigError);
    }
}

TEST_CASE("missing required keys are named") {
    // each removal knocks out one required key
    const std::string no_seed = R"({
      "event": {"event_id": "e", "magnitude": 5.0, "depth_km": 1.0, "lat": 0.0, "lon": 0.0,
                "origin_time_ms": 5},
      "population": 10,
      "models": {"relevance": "a", "damage_presence": "b", "damage_info": "c",
                 "witness_scorer": "d", "witness_centroid": "e"},
      "gazetteer": "g.tsv"
    })";
    try {
        parse_scenario_config(no_seed, "");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("seed") != std::string::npos);
    }

    std::string no_centroid = minimal_config();
    const std::string needle = "\"witness_centroid\": \"e.json\"";
    const auto pos = no_centroid.find(needle);
    REQUIRE(pos != std::string::npos);
    no_centroid.replace(pos, needle.size(), "\"witness_centroid_\": \"e.json\"");
    CHECK_THROWS_AS(parse_scenario_config(no_centroid, ""), ConfigError);
}

TEST_CASE("out of range values are rejected") {
    ScenarioConfig cfg = parse_scenario_config(minimal_config(), "");
    CHECK_NOTHROW(validate_scenario_config(cfg));

    auto broken = [&](auto mutate) {
        ScenarioConfig copy = cfg;
        mutate(copy);
        CHECK_THROWS_AS(validate_scenario_config(copy), ConfigError);
    };
    broken([](ScenarioConfig& c) { c.p_reply = 1.3; });
    broken([](ScenarioConfig& c) { c.p_geotag = -0.1; });
    broken([](ScenarioConfig& c) { c.latency_sigma_log = 0.0; });
    broken([](ScenarioConfig& c) { c.felt_r0 = 0.0; });
    broken([](ScenarioConfig& c) { c.bots.count = 0; });
    broken([](ScenarioConfig& c) { c.bots.max_sends = 0; });
    broken([](ScenarioConfig& c) { c.bots.window_s = 0.0; });
    broken([](ScenarioConfig& c) { c.mix = {0.5, 0.5, 0.2}; });
    broken([](ScenarioConfig& c) { c.text_noise = 1.5; });
    broken([](ScenarioConfig& c) { c.grid_cell_deg = 0.0; });
    broken([](ScenarioConfig& c) { c.time_window_s = -1.0; });
    broken([](ScenarioConfig& c) { c.keywords = {"quake", ""}; });
    broken([](ScenarioConfig& c) {
        c.keywords.clear();
        c.collect_geotag_radius_km = 0.0;
    });
    broken([](ScenarioConfig& c) { c.event.magnitude = 11.0; });
    broken([](ScenarioConfig& c) { c.models.witness_scorer.clear(); });
    broken([](ScenarioConfig& c) { c.models.relevance_threshold = 1.5; });
    broken([](ScenarioConfig& c) { c.gazetteer_path.clear(); });
    broken([](ScenarioConfig& c) {
        c.crawl.max_messages = 5;
        c.crawl.window_ms = 0;
    });

    // geotag-only collection is legal
    ScenarioConfig geo_only = cfg;
    geo_only.keywords.clear();
    geo_only.collect_geotag_radius_km = 25.0;
    CHECK_NOTHROW(validate_scenario_config(geo_only));
}

TEST_CASE("malformed documents are config errors") {
    CHECK_THROWS_AS(parse_scenario_config("not json at all", ""), ConfigError);
    CHECK_THROWS_AS(parse_scenario_config("[1, 2, 3]", ""), ConfigError);
    CHECK_THROWS_AS(parse_scenario_config("{\"seed\": \"forty-two\"}", ""), ConfigError);
    CHECK_THROWS_AS(parse_scenario_config("{\"seed\": -3}", ""), ConfigError);

    std::string bad_keywords = minimal_config();
    const std::string gaz = "\"gazetteer\": \"g.tsv\"";
    bad_keywords.replace(bad_keywords.find(gaz), gaz.size(),
                         gaz + ", \"keywords\": {\"quake\": true}");
    CHECK_THROWS_AS(parse_scenario_config(bad_keywords, ""), ConfigError);
}

TEST_CASE("the event can come from a feed file") {
    const auto dir = fs::temp_directory_path() / "qs_scenario_feed";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "feed.json");
        out << R"({"type": "FeatureCollection", "features": [
          {"type": "Feature", "id": "small", "properties": {"mag": 2.0, "place": "tiny town",
           "time": 1000}, "geometry": {"type": "Point", "coordinates": [84.0, 28.0, 8.0]}},
          {"type": "Feature", "id": "big", "properties": {"mag": 7.5, "place": "the hills",
           "time": 2000}, "geometry": {"type": "Point", "coordinates": [84.45, 28.15, 12.0]}}
        ]})";
    }

    std::string doc = minimal_config();
    const std::string event_obj =
        R"("event": {"event_id": "e1", "magnitude": 5.0, "depth_km": 10.0, "lat": 1.0, "lon": 2.0,
                "origin_time_ms": 1000})";
    const auto pos = doc.find(event_obj);
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, event_obj.size(), R"("event": {"feed": "feed.json"})");

    const ScenarioConfig cfg = parse_scenario_config(doc, dir.string());
    // the 2.0 event is below the default threshold; the 7.5 one triggers
    CHECK(cfg.event.event_id == "big");
    CHECK(cfg.event.magnitude == doctest::Approx(7.5));
    CHECK(cfg.event.epicenter.lat == doctest::Approx(28.15));

    std::string high_bar = doc;
    high_bar.replace(high_bar.find("\"feed\": \"feed.json\""),
                     std::string("\"feed\": \"feed.json\"").size(),
                     "\"feed\": \"feed.json\", \"min_magnitude\": 8.0");
    CHECK_THROWS_AS(parse_scenario_config(high_bar, dir.string()), ConfigError);

    std::string missing = doc;
    missing.replace(missing.find("feed.json"), 9, "gone.json");
    CHECK_THROWS_AS(parse_scenario_config(missing, dir.string()), ConfigError);

    fs::remove_all(dir);
}

TEST_CASE("serialization round trips") {
    const ScenarioConfig first = parse_scenario_config(kFullConfig, "");
    const std::string emitted = scenario_to_json(first);
    const ScenarioConfig second = parse_scenario_config(emitted, "");
    CHECK(scenario_to_json(second) == emitted);

    const ScenarioConfig sparse = parse_scenario_config(minimal_config(), "");
    const std::string sparse_emitted = scenario_to_json(sparse);
    CHECK(scenario_to_json(parse_scenario_config(sparse_emitted, "")) == sparse_emitted);
}

TEST_CASE("load resolves against the file directory") {
    const auto dir = fs::temp_directory_path() / "qs_scenario_load";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "scenario.json");
        out << minimal_config();
    }
    const ScenarioConfig cfg = load_scenario_config((dir / "scenario.json").string());
    CHECK(cfg.gazetteer_path == (dir / "g.tsv").string());
    CHECK(cfg.models.relevance == (dir / "a.json").string());

    CHECK_THROWS_AS(load_scenario_config((dir / "nope.json").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("filter and world config mappings") {
    const ScenarioConfig cfg = parse_scenario_config(kFullConfig, "/base");

    const CollectionFilter filter = scenario_filter(cfg);
    CHECK(filter.keywords == cfg.keywords);
    CHECK(filter.match_geotagged_in_radius);
    CHECK(filter.radius_km == doctest::Approx(30.0));

    const ScenarioConfig bare = parse_scenario_config(minimal_config(), "");
    CHECK_FALSE(scenario_filter(bare).match_geotagged_in_radius);

    const WorldConfig wc = scenario_world_config(cfg);
    CHECK(wc.population == 5000);
    CHECK(wc.p_post == doctest::Approx(0.4));
    CHECK(wc.p_geotag == doctest::Approx(0.05));
    CHECK(wc.p_reply == doctest::Approx(0.7));
    CHECK(wc.p_collaborative == doctest::Approx(0.85));
    CHECK(wc.latency_mu_log == doctest::Approx(2.0));
    CHECK(wc.latency_sigma_log == doctest::Approx(0.6));
    CHECK(wc.felt_r0 == doctest::Approx(0.6));
    CHECK(wc.mix.witness == doctest::Approx(0.1));
    CHECK(wc.noise == doctest::Approx(0.2));
    CHECK(wc.time_window_ms == 1200000);
    CHECK(wc.enrichment.place_density_factor == doctest::Approx(3.0));
}
