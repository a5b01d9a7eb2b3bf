#include "quakesense/feed.hpp"

#include <set>
#include <sstream>

#include "json.hpp"

#include "quakesense/errors.hpp"

namespace quakesense {

using nlohmann::ordered_json;

void validate_event(const EarthquakeEvent& ev, const std::string& context) {
    auto fail = [&](const std::string& what) {
        throw ValidationError(context + ": " + what);
    };
    if (ev.event_id.empty()) fail("empty event_id");
    if (!(ev.magnitude >= 0.0 && ev.magnitude <= 10.0))
        fail("magnitude " + std::to_string(ev.magnitude) + " outside [0, 10]");
    if (!(ev.depth_km >= 0.0)) fail("negative depth_km");
    if (!valid_lat(ev.epicenter.lat))
        fail("latitude " + std::to_string(ev.epicenter.lat) + " outside [-90, 90]");
    if (!valid_lon(ev.epicenter.lon))
        fail("longitude " + std::to_string(ev.epicenter.lon) + " outside [-180, 180]");
    if (!(ev.origin_time_ms > 0)) fail("origin_time must be positive");
}

std::vector<EarthquakeEvent> parse_usgs_feed(const std::string& document) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(document);
    } catch (const std::exception& e) {
        throw ParseError(std::string("feed is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array())
        throw ParseError("feed must be an object with a `features` array");

    std::vector<EarthquakeEvent> events;
    std::set<std::string> seen_ids;
    const auto& features = doc["features"];
    for (std::size_t i = 0; i < features.size(); ++i) {
        const std::string where = "feature " + std::to_string(i);
        const auto& f = features[i];
        try {
            EarthquakeEvent ev;
            ev.event_id = f.at("id").get<std::string>();
            const auto& props = f.at("properties");
            ev.magnitude = props.at("mag").get<double>();
            ev.origin_time_ms = props.at("time").get<std::int64_t>();
            if (props.contains("place")) ev.place_name = props["place"].get<std::string>();
            const auto& coords = f.at("geometry").at("coordinates");
            if (!coords.is_array() || coords.size() < 3)
                throw ParseError(where + ": geometry.coordinates must be [lon, lat, depth]");
            ev.epicenter.lon = coords[0].get<double>();
            ev.epicenter.lat = coords[1].get<double>();
            ev.depth_km = coords[2].get<double>();
            validate_event(ev, where);
            if (!seen_ids.insert(ev.event_id).second)
                throw ValidationError(where + ": duplicate event_id `" + ev.event_id + "`");
            events.push_back(std::move(ev));
        } catch (const ValidationError&) {
            throw;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    return events;
}

std::string serialize_feed(const std::vector<EarthquakeEvent>& events) {
    ordered_json features = ordered_json::array();
    for (const auto& ev : events) {
        ordered_json f;
        f["id"] = ev.event_id;
        f["properties"] = {{"mag", ev.magnitude},
                           {"time", ev.origin_time_ms},
                           {"place", ev.place_name}};
        f["geometry"] = {
            {"type", "Point"},
            {"coordinates",
             ordered_json::array({ev.epicenter.lon, ev.epicenter.lat, ev.depth_km})}};
        features.push_back(std::move(f));
    }
    ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = std::move(features);
    return doc.dump(2) + "\n";
}

}  // namespace quakesense
