#include "doctest.h"

#include <string>
#include <vector>

#include "quakesense/errors.hpp"
#include "quakesense/feed.hpp"

using namespace quakesense;

namespace {

const char* kSampleFeed = R"({
  "type": "FeatureCollection",
  "metadata": {"generated": 1429900000000, "count": 2},
  "features": [
    {
      "id": "us20002926",
      "properties": {"mag": 7.5, "time": 1429900000000, "place": "Lamjung, Nepal"},
      "geometry": {"type": "Point", "coordinates": [84.45, 28.15, 12.0]}
    },
    {
      "id": "nc72282711",
      "properties": {"mag": 3.5, "time": 1408600000000, "place": "San Ramon, California"},
      "geometry": {"type": "Point", "coordinates": [-121.95, 37.76, 11.0]}
    }
  ]
})";

}  // namespace

TEST_CASE("feed features parse with coordinates unpacked as lon, lat, depth") {
    const auto events = parse_usgs_feed(kSampleFeed);
    REQUIRE(events.size() == 2);

    CHECK(events[0].event_id == "us20002926");
    CHECK(events[0].magnitude == doctest::Approx(7.5));
    CHECK(events[0].depth_km == doctest::Approx(12.0));
    CHECK(events[0].epicenter.lat == doctest::Approx(28.15));
    CHECK(events[0].epicenter.lon == doctest::Approx(84.45));
    CHECK(events[0].origin_time_ms == 1'429'900'000'000);
    CHECK(events[0].place_name == "Lamjung, Nepal");

    // input order preserved
    CHECK(events[1].event_id == "nc72282711");
    CHECK(events[1].magnitude == doctest::Approx(3.5));
}

TEST_CASE("empty feature collection parses to an empty list") {
    CHECK(parse_usgs_feed(R"({"features": []})").empty());
}

TEST_CASE("unknown feed fields are ignored") {
    const auto events = parse_usgs_feed(R"({
        "features": [{
            "id": "x1",
            "properties": {"mag": 4.0, "time": 1000, "place": "somewhere", "tsunami": 0},
            "geometry": {"coordinates": [10.0, 20.0, 5.0], "extra": true},
            "bbox": [0, 0, 0, 0]
        }],
        "api": "2.1"
    })");
    REQUIRE(events.size() == 1);
    CHECK(events[0].event_id == "x1");
}

TEST_CASE("out-of-range latitude is a validation error") {
    const std::string doc = R"({"features": [{
        "id": "bad",
        "properties": {"mag": 4.0, "time": 1000, "place": "nowhere"},
        "geometry": {"coordinates": [10.0, 95.0, 5.0]}
    }]})";
    CHECK_THROWS_AS(parse_usgs_feed(doc), ValidationError);
}

TEST_CASE("malformed document is a parse error naming the feature") {
    CHECK_THROWS_AS(parse_usgs_feed("not json at all"), ParseError);
    CHECK_THROWS_AS(parse_usgs_feed(R"({"features": 3})"), ParseError);

    const std::string missing_mag = R"({"features": [
        {"id": "ok", "properties": {"mag": 4.0, "time": 1}, "geometry": {"coordinates": [1, 2, 3]}},
        {"id": "broken", "properties": {"time": 1}, "geometry": {"coordinates": [1, 2, 3]}}
    ]})";
    try {
        parse_usgs_feed(missing_mag);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("duplicate event ids within a feed are rejected") {
    const std::string doc = R"({"features": [
        {"id": "dup", "properties": {"mag": 4.0, "time": 1, "place": "a"},
         "geometry": {"coordinates": [1, 2, 3]}},
        {"id": "dup", "properties": {"mag": 5.0, "time": 2, "place": "b"},
         "geometry": {"coordinates": [4, 5, 6]}}
    ]})";
    CHECK_THROWS_AS(parse_usgs_feed(doc), ValidationError);
}

TEST_CASE("parse then serialize then parse is a fixed point") {
    const auto first = parse_usgs_feed(kSampleFeed);
    const auto second = parse_usgs_feed(serialize_feed(first));
    CHECK(first == second);
    // and once more for stability of the serialized form itself
    CHECK(serialize_feed(first) == serialize_feed(second));
}

TEST_CASE("trigger threshold is inclusive") {
    EarthquakeEvent ev;
    ev.event_id = "t";
    ev.origin_time_ms = 1;
    ev.place_name = "x";

    ev.magnitude = 3.3;
    CHECK(should_trigger(ev, 3.0));
    ev.magnitude = 2.9;
    CHECK_FALSE(should_trigger(ev, 3.0));
    ev.magnitude = 3.0;
    CHECK(should_trigger(ev, 3.0));
}

TEST_CASE("trigger is monotone in magnitude") {
    EarthquakeEvent ev;
    ev.event_id = "t";
    ev.origin_time_ms = 1;
    bool prev = false;
    for (double m = 0.0; m <= 10.0; m += 0.1) {
        ev.magnitude = m;
        const bool now = should_trigger(ev, 4.2);
        if (prev) CHECK(now);  // once true, stays true
        prev = now;
    }
    CHECK(prev);
}

TEST_CASE("event validation names the offending field") {
    EarthquakeEvent ev;
    ev.event_id = "v";
    ev.magnitude = 5.0;
    ev.depth_km = 10.0;
    ev.epicenter = {0.0, 0.0};
    ev.origin_time_ms = 1;

    CHECK_NOTHROW(validate_event(ev, "test"));

    auto broken = ev;
    broken.magnitude = 11.0;
    CHECK_THROWS_AS(validate_event(broken, "test"), ValidationError);

    broken = ev;
    broken.depth_km = -1.0;
    CHECK_THROWS_AS(validate_event(broken, "test"), ValidationError);

    broken = ev;
    broken.origin_time_ms = 0;
    CHECK_THROWS_AS(validate_event(broken, "test"), ValidationError);

    broken = ev;
    broken.event_id.clear();
    CHECK_THROWS_AS(validate_event(broken, "test"), ValidationError);
}
