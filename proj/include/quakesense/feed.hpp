#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quakesense/geo.hpp"

namespace quakesense {

struct EarthquakeEvent {
    std::string event_id;
    double magnitude = 0.0;  // Richter
    double depth_km = 0.0;
    LatLon epicenter;
    std::int64_t origin_time_ms = 0;  // epoch ms
    std::string place_name;

    bool operator==(const EarthquakeEvent&) const = default;
};

// Throws ValidationError naming the offending field when an invariant fails.
void validate_event(const EarthquakeEvent& ev, const std::string& context);

// Parse a GeoJSON-style feed: top-level `features` array, each feature with
// `id`, `properties.mag`, `properties.time`, `properties.place` and
// `geometry.coordinates` = [lon, lat, depth_km]. Unknown fields are ignored.
// Order of features is preserved. Throws ParseError (bad document, with the
// offending feature index) or ValidationError (out-of-range values).
std::vector<EarthquakeEvent> parse_usgs_feed(const std::string& document);

// Inverse of parse_usgs_feed; parse(serialize(parse(doc))) == parse(doc).
std::string serialize_feed(const std::vector<EarthquakeEvent>& events);

inline constexpr double kDefaultMinMagnitude = 3.0;

// Inclusive threshold: campaigns start at magnitude >= min_magnitude.
inline bool should_trigger(const EarthquakeEvent& ev,
                           double min_magnitude = kDefaultMinMagnitude) {
    return ev.magnitude >= min_magnitude;
}

}  // namespace quakesense
