#include "doctest.h"

#include <string>
#include <vector>

#include "quakesense/errors.hpp"
#include "quakesense/ingest.hpp"

using namespace quakesense;

namespace {

EarthquakeEvent test_event() {
    EarthquakeEvent ev;
    ev.event_id = "ingest-test";
    ev.magnitude = 5.0;
    ev.depth_km = 10.0;
    ev.epicenter = {37.76, -121.95};
    ev.origin_time_ms = 1'000'000;
    ev.place_name = "test area";
    return ev;
}

RawMessage msg(std::string id, std::int64_t ts, std::string text) {
    RawMessage m;
    m.msg_id = std::move(id);
    m.author_id = "u-" + m.msg_id;
    m.timestamp_ms = ts;
    m.text = std::move(text);
    return m;
}

CollectionFilter keyword_filter() {
    CollectionFilter f;
    f.keywords = {"earthquake", "quake"};
    return f;
}

}  // namespace

TEST_CASE("keyword match is case-insensitive") {
    CHECK(match(msg("a", 1, "Felt an EARTHQUAKE just now"), keyword_filter(), test_event()));
    CHECK(match(msg("b", 1, "QuAkE?!"), keyword_filter(), test_event()));
}

TEST_CASE("keywords match on word boundaries only") {
    const auto ev = test_event();
    CHECK_FALSE(match(msg("a", 1, "quakes"), keyword_filter(), ev));
    CHECK_FALSE(match(msg("b", 1, "earthquakeproof building"), keyword_filter(), ev));
    CHECK(match(msg("c", 1, "quake, then silence"), keyword_filter(), ev));
    CHECK(match(msg("d", 1, "pre-quake calm"), keyword_filter(), ev));
}

TEST_CASE("geotag criterion matches inside the radius") {
    CollectionFilter f;
    f.keywords = {"earthquake"};
    f.match_geotagged_in_radius = true;
    f.radius_km = 50.0;
    const auto ev = test_event();

    RawMessage inside = msg("in", 1, "no tracked words at all");
    inside.geotag = offset_km(ev.epicenter, 5.0, 1.0);
    CHECK(match(inside, f, ev));

    RawMessage outside = msg("out", 1, "no tracked words at all");
    outside.geotag = offset_km(ev.epicenter, 80.0, 1.0);
    CHECK_FALSE(match(outside, f, ev));

    RawMessage untagged = msg("none", 1, "no tracked words at all");
    CHECK_FALSE(match(untagged, f, ev));
}

TEST_CASE("filter validation rejects broken criteria") {
    CollectionFilter empty;
    CHECK_THROWS_AS(validate_filter(empty), ConfigError);

    CollectionFilter mixed_case;
    mixed_case.keywords = {"Earthquake"};
    CHECK_THROWS_AS(validate_filter(mixed_case), ConfigError);

    CollectionFilter blank;
    blank.keywords = {""};
    CHECK_THROWS_AS(validate_filter(blank), ConfigError);

    CollectionFilter geo_no_radius;
    geo_no_radius.match_geotagged_in_radius = true;
    geo_no_radius.radius_km = 0.0;
    CHECK_THROWS_AS(validate_filter(geo_no_radius), ConfigError);

    CHECK_NOTHROW(validate_filter(keyword_filter()));
}

TEST_CASE("default keywords are lowercase and non-empty") {
    const auto& kw = default_keywords();
    REQUIRE_FALSE(kw.empty());
    for (const auto& k : kw) {
        REQUIRE_FALSE(k.empty());
        for (char c : k) CHECK_FALSE(bool(std::isupper(static_cast<unsigned char>(c))));
    }
}

TEST_CASE("collect keeps matching messages and skips the rest") {
    std::vector<RawMessage> stream;
    stream.push_back(msg("m1", 10, "big earthquake here"));
    stream.push_back(msg("m2", 20, "lunch was great"));
    stream.push_back(msg("m3", 30, "aftershock quake again"));

    const auto result = collect(stream, keyword_filter(), test_event(), {});
    REQUIRE(result.collected.size() == 2);
    CHECK(result.collected[0].msg_id == "m1");
    CHECK(result.collected[1].msg_id == "m3");
    CHECK(result.dropped_by_crawl == 0);
    CHECK(result.duplicates_skipped == 0);
}

TEST_CASE("collect on an empty stream is empty") {
    CHECK(collect({}, keyword_filter(), test_event(), {}).collected.empty());
}

TEST_CASE("crawl quota drops the newest messages beyond the limit") {
    // 100 matches inside one window, quota 60: first 60 kept, 40 dropped
    std::vector<RawMessage> stream;
    for (int i = 0; i < 100; ++i) {
        stream.push_back(msg("m" + std::to_string(i), 1000 + i, "quake report"));
    }
    CrawlLimit limit;
    limit.max_messages = 60;
    limit.window_ms = 60'000;

    const auto result = collect(stream, keyword_filter(), test_event(), limit);
    CHECK(result.collected.size() == 60);
    CHECK(result.dropped_by_crawl == 40);
    for (int i = 0; i < 60; ++i) CHECK(result.collected[std::size_t(i)].msg_id == "m" + std::to_string(i));
}

TEST_CASE("crawl quota refills once the window slides past") {
    std::vector<RawMessage> stream;
    for (int i = 0; i < 4; ++i) stream.push_back(msg("a" + std::to_string(i), 0, "quake"));
    for (int i = 0; i < 4; ++i) stream.push_back(msg("b" + std::to_string(i), 1000, "quake"));
    CrawlLimit limit;
    limit.max_messages = 3;
    limit.window_ms = 1000;

    const auto result = collect(stream, keyword_filter(), test_event(), limit);
    // 3 kept at t=0, one dropped; window [0,1000) has slid at t=1000: 3 more
    CHECK(result.collected.size() == 6);
    CHECK(result.dropped_by_crawl == 2);
}

TEST_CASE("duplicate msg_ids are skipped and counted") {
    std::vector<RawMessage> stream;
    stream.push_back(msg("dup", 10, "quake one"));
    stream.push_back(msg("dup", 20, "quake two"));
    stream.push_back(msg("m2", 30, "quake three"));

    const auto result = collect(stream, keyword_filter(), test_event(), {});
    CHECK(result.collected.size() == 2);
    CHECK(result.duplicates_skipped == 1);
}

TEST_CASE("out-of-order streams are rejected") {
    std::vector<RawMessage> stream;
    stream.push_back(msg("m1", 100, "quake"));
    stream.push_back(msg("m2", 50, "quake"));
    CHECK_THROWS_AS(collect(stream, keyword_filter(), test_event(), {}), ValidationError);
}

TEST_CASE("collect is idempotent") {
    std::vector<RawMessage> stream;
    for (int i = 0; i < 50; ++i) {
        stream.push_back(msg("m" + std::to_string(i), 100 + i * 7,
                             i % 3 == 0 ? "felt the quake" : "nothing to see"));
    }
    CrawlLimit limit;
    limit.max_messages = 10;
    limit.window_ms = 100;

    const auto once = collect(stream, keyword_filter(), test_event(), limit);
    const auto twice = collect(once.collected, keyword_filter(), test_event(), limit);
    CHECK(twice.collected == once.collected);
    CHECK(twice.dropped_by_crawl == 0);
}

TEST_CASE("relaxing the crawl limit never loses messages") {
    std::vector<RawMessage> stream;
    for (int i = 0; i < 200; ++i) {
        stream.push_back(msg("m" + std::to_string(i), i * 13, "quake number " + std::to_string(i)));
    }

    CrawlLimit tight{5, 500};
    CrawlLimit loose{20, 500};
    const auto small = collect(stream, keyword_filter(), test_event(), tight);
    const auto big = collect(stream, keyword_filter(), test_event(), loose);
    const auto unlimited = collect(stream, keyword_filter(), test_event(), {});

    CHECK(small.collected.size() <= big.collected.size());
    CHECK(big.collected.size() <= unlimited.collected.size());

    // subset relation, not just counts
    std::size_t j = 0;
    for (const auto& m : big.collected) {
        if (j < small.collected.size() && small.collected[j].msg_id == m.msg_id) ++j;
    }
    CHECK(j == small.collected.size());
}
