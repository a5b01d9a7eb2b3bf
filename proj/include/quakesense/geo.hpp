#pragma once

#include <cmath>

namespace quakesense {

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const LatLon&) const = default;
};

inline bool valid_lat(double lat) { return lat >= -90.0 && lat <= 90.0; }
inline bool valid_lon(double lon) { return lon >= -180.0 && lon <= 180.0; }
inline bool valid_latlon(const LatLon& p) { return valid_lat(p.lat) && valid_lon(p.lon); }

inline constexpr double kEarthRadiusKm = 6371.0088;

inline double deg2rad(double d) { return d * (M_PI / 180.0); }

// Great-circle distance, haversine form.
inline double haversine_km(const LatLon& a, const LatLon& b) {
    const double dlat = deg2rad(b.lat - a.lat);
    const double dlon = deg2rad(b.lon - a.lon);
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    const double h = s1 * s1 + std::cos(deg2rad(a.lat)) * std::cos(deg2rad(b.lat)) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// Destination point at the given distance and bearing. Good enough at the
// scales used here (population layout, synthetic gazetteers); not geodesic.
inline LatLon offset_km(const LatLon& origin, double distance_km, double bearing_rad) {
    const double ang = distance_km / kEarthRadiusKm;
    const double lat1 = deg2rad(origin.lat);
    const double lon1 = deg2rad(origin.lon);
    const double lat2 = std::asin(std::sin(lat1) * std::cos(ang) +
                                  std::cos(lat1) * std::sin(ang) * std::cos(bearing_rad));
    const double lon2 =
        lon1 + std::atan2(std::sin(bearing_rad) * std::sin(ang) * std::cos(lat1),
                          std::cos(ang) - std::sin(lat1) * std::sin(lat2));
    double lon_deg = lon2 * (180.0 / M_PI);
    while (lon_deg > 180.0) lon_deg -= 360.0;
    while (lon_deg < -180.0) lon_deg += 360.0;
    return {lat2 * (180.0 / M_PI), lon_deg};
}

}  // namespace quakesense
