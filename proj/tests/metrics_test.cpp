#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "quakesense/errors.hpp"
#include "quakesense/metrics.hpp"
#include "quakesense/rng.hpp"

using namespace quakesense;

namespace {

EarthquakeEvent event() {
    EarthquakeEvent ev;
    ev.event_id = "metrics-test";
    ev.magnitude = 5.0;
    ev.depth_km = 10.0;
    ev.epicenter = {28.15, 84.45};
    ev.origin_time_ms = 1'000'000;
    ev.place_name = "test zone";
    return ev;
}

PlaceTag tag(std::string place_id, Granularity g, double lat = 27.71, double lon = 85.32) {
    PlaceTag t;
    t.surface = place_id;
    t.begin = 0;
    t.end = place_id.size();
    t.place_id = std::move(place_id);
    t.position = {lat, lon};
    t.granularity = g;
    return t;
}

TaggedMessage tagged(std::string id, DamageLabel damage, std::vector<PlaceTag> tags = {}) {
    TaggedMessage tm;
    tm.message.msg_id = std::move(id);
    tm.message.author_id = "u-" + tm.message.msg_id;
    tm.message.timestamp_ms = 2'000'000;
    tm.message.text = "placeholder";
    tm.damage = damage;
    tm.tags = std::move(tags);
    return tm;
}

MessageSet view(const std::vector<TaggedMessage>& xs) {
    MessageSet set;
    set.reserve(xs.size());
    for (const auto& tm : xs) set.push_back(&tm);
    return set;
}

// collected/relevant/reply skeleton sized to order; reply deltas all 5 min
EventLog log_with_counts(std::size_t collected, std::size_t relevant, std::size_t replies,
                         std::size_t collaborative) {
    EventLog log;
    log.event = event();
    for (std::size_t i = 0; i < collected; ++i) {
        RawMessage m;
        m.msg_id = "c" + std::to_string(i);
        m.author_id = "u" + std::to_string(i);
        m.timestamp_ms = 2'000'000 + std::int64_t(i);
        m.text = "spontaneous " + std::to_string(i);
        log.collected.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < relevant; ++i) {
        TaggedMessage tm;
        tm.message = log.collected[i];
        log.relevant.push_back(std::move(tm));
    }
    for (std::size_t i = 0; i < replies; ++i) {
        ReplyRecord r;
        r.tagged.message.msg_id = "r" + std::to_string(i);
        r.tagged.message.author_id = "ru" + std::to_string(i);
        r.tagged.message.timestamp_ms = 3'000'000 + std::int64_t(i);
        r.tagged.message.text = "reply " + std::to_string(i);
        r.question_id = "q-" + std::to_string(i);
        r.kind = QuestionKind::ask_geo;
        r.delta_t_min = 5.0;
        r.collaborative = i < collaborative;
        log.replies.push_back(std::move(r));
    }
    log.counters.questions_sent = replies;
    return log;
}

}  // namespace

TEST_CASE("message gain reproduces the published ratios") {
    const EventLog san_ramon = log_with_counts(2266, 836, 164, 128);
    CHECK(message_gain(san_ramon) == doctest::Approx(164.0 / 836.0));
    CHECK(format_gain(message_gain(san_ramon)) == "+20%");

    const EventLog nepal = log_with_counts(117774, 8545, 160, 150);
    CHECK(format_gain(message_gain(nepal)) == "+2%");
}

TEST_CASE("message gain needs relevant messages") {
    EventLog log = log_with_counts(10, 0, 0, 0);
    CHECK_THROWS_AS(message_gain(log), MetricUndefined);
}

TEST_CASE("zero replies is a defined zero gain") {
    const EventLog log = log_with_counts(10, 5, 0, 0);
    CHECK(message_gain(log) == doctest::Approx(0.0));
}

TEST_CASE("collaborative rate over the reply set") {
    const EventLog log = log_with_counts(2266, 836, 164, 128);
    CHECK(collaborative_rate(log) == doctest::Approx(128.0 / 164.0));
    CHECK(format_percent(collaborative_rate(log)) == "78%");

    const EventLog all = log_with_counts(10, 5, 4, 4);
    CHECK(collaborative_rate(all) == doctest::Approx(1.0));

    EventLog none = log_with_counts(10, 5, 0, 0);
    CHECK_THROWS_AS(collaborative_rate(none), MetricUndefined);
}

TEST_CASE("mean reply latency is the plain average") {
    EventLog log = log_with_counts(10, 5, 2, 2);
    log.replies[0].delta_t_min = 10.0;
    log.replies[1].delta_t_min = 20.0;
    CHECK(mean_reply_latency(log) == doctest::Approx(15.0));

    const EventLog flat = log_with_counts(10, 5, 3, 3);
    CHECK(mean_reply_latency(flat) == doctest::Approx(5.0));

    EventLog none = log_with_counts(10, 5, 0, 0);
    CHECK_THROWS_AS(mean_reply_latency(none), MetricUndefined);
}

TEST_CASE("damage ratio counts only present") {
    std::vector<TaggedMessage> xs;
    for (int i = 0; i < 3; ++i) xs.push_back(tagged("p" + std::to_string(i), DamageLabel::present));
    for (int i = 0; i < 4; ++i)
        xs.push_back(tagged("a" + std::to_string(i), DamageLabel::absent_reported));
    for (int i = 0; i < 5; ++i) xs.push_back(tagged("n" + std::to_string(i), DamageLabel::no_info));

    CHECK(damage_ratio(view(xs)) == doctest::Approx(0.25));
    CHECK_THROWS_AS(damage_ratio({}), MetricUndefined);

    std::vector<TaggedMessage> calm{tagged("x", DamageLabel::no_info)};
    CHECK(damage_ratio(view(calm)) == doctest::Approx(0.0));
}

TEST_CASE("damage info ratio counts informative labels of either direction") {
    std::vector<TaggedMessage> xs;
    for (int i = 0; i < 4; ++i) xs.push_back(tagged("p" + std::to_string(i), DamageLabel::present));
    for (int i = 0; i < 4; ++i)
        xs.push_back(tagged("a" + std::to_string(i), DamageLabel::absent_reported));
    for (int i = 0; i < 2; ++i) xs.push_back(tagged("n" + std::to_string(i), DamageLabel::no_info));
    CHECK(damage_info_ratio(view(xs)) == doctest::Approx(0.8));
    CHECK_THROWS_AS(damage_info_ratio({}), MetricUndefined);
}

TEST_CASE("place density averages tag counts") {
    std::vector<TaggedMessage> xs{
        tagged("m1", DamageLabel::no_info,
               {tag("a", Granularity::city), tag("b", Granularity::city),
                tag("c", Granularity::region)}),
        tagged("m2", DamageLabel::no_info, {tag("a", Granularity::city)}),
    };
    CHECK(place_density(view(xs)) == doctest::Approx(2.0));

    std::vector<TaggedMessage> bare{tagged("m3", DamageLabel::no_info)};
    CHECK(place_density(view(bare)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(place_density({}), MetricUndefined);
}

TEST_CASE("variety deduplicates within a message") {
    std::vector<TaggedMessage> xs{tagged(
        "m1", DamageLabel::no_info, {tag("paris", Granularity::city), tag("paris", Granularity::city)})};
    CHECK(place_variety(view(xs), VarietyMode::per_message) == doctest::Approx(1.0));
    CHECK(place_density(view(xs)) == doctest::Approx(2.0));
}

TEST_CASE("variety modes differ on cross-message repeats") {
    std::vector<TaggedMessage> xs{
        tagged("m1", DamageLabel::no_info, {tag("kat", Granularity::city)}),
        tagged("m2", DamageLabel::no_info, {tag("kat", Granularity::city)}),
    };
    CHECK(place_variety(view(xs), VarietyMode::per_message) == doctest::Approx(1.0));
    CHECK(place_variety(view(xs), VarietyMode::event_level) == doctest::Approx(0.5));
    CHECK_THROWS_AS(place_variety({}, VarietyMode::per_message), MetricUndefined);
}

TEST_CASE("per-message variety never exceeds density") {
    Rng rng(404);
    const std::vector<std::string> ids{"a", "b", "c", "d"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<TaggedMessage> xs;
        const std::size_t n = 1 + rng.below(6);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<PlaceTag> tags;
            const std::size_t k = rng.below(5);
            for (std::size_t j = 0; j < k; ++j) {
                tags.push_back(tag(ids[rng.below(ids.size())], Granularity::city));
            }
            xs.push_back(tagged("m" + std::to_string(i), DamageLabel::no_info, std::move(tags)));
        }
        const auto set = view(xs);
        CHECK(place_variety(set, VarietyMode::per_message) <= place_density(set) + 1e-12);
    }
}

TEST_CASE("coverage gain measures newly discovered places") {
    std::vector<TaggedMessage> relevant{
        tagged("m1", DamageLabel::no_info, {tag("A", Granularity::city)}),
        tagged("m2", DamageLabel::no_info, {tag("B", Granularity::city)}),
    };
    std::vector<TaggedMessage> replies{
        tagged("r1", DamageLabel::no_info, {tag("B", Granularity::city)}),
        tagged("r2", DamageLabel::no_info, {tag("C", Granularity::city)}),
    };
    CHECK(coverage_gain(view(replies), view(relevant)) == doctest::Approx(0.5));

    std::vector<TaggedMessage> subset{
        tagged("r3", DamageLabel::no_info, {tag("A", Granularity::city)})};
    CHECK(coverage_gain(view(subset), view(relevant)) == doctest::Approx(0.0));

    std::vector<TaggedMessage> unknown{tagged("m", DamageLabel::no_info)};
    CHECK_THROWS_AS(coverage_gain(view(replies), view(unknown)), MetricUndefined);
}

TEST_CASE("granularity distribution covers every level and sums to one") {
    std::vector<TaggedMessage> xs{
        tagged("m1", DamageLabel::no_info,
               {tag("a", Granularity::city), tag("b", Granularity::city)}),
        tagged("m2", DamageLabel::no_info,
               {tag("c", Granularity::country), tag("d", Granularity::other)}),
    };
    const auto dist = granularity_distribution(view(xs));
    CHECK(dist.at(Granularity::city) == doctest::Approx(0.5));
    CHECK(dist.at(Granularity::country) == doctest::Approx(0.25));
    CHECK(dist.at(Granularity::other) == doctest::Approx(0.25));
    CHECK(dist.at(Granularity::region) == doctest::Approx(0.0));
    CHECK(dist.at(Granularity::building) == doctest::Approx(0.0));

    double total = 0.0;
    for (const auto& [g, f] : dist) total += f;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<TaggedMessage> untagged{tagged("m", DamageLabel::no_info)};
    CHECK_THROWS_AS(granularity_distribution(view(untagged)), MetricUndefined);
}

TEST_CASE("percent rounding is half to even") {
    CHECK(round_percent(164.0 / 836.0) == 20);
    CHECK(round_percent(0.125) == 12);
    CHECK(round_percent(0.135) == 14);
    CHECK(round_percent(0.0) == 0);
    CHECK(round_percent(1.0) == 100);
    CHECK(format_gain(0.196) == "+20%");
    CHECK(format_gain(0.0187) == "+2%");
    CHECK(format_percent(0.7804) == "78%");
}

TEST_CASE("crisis map bins damage at the finest tag") {
    std::vector<TaggedMessage> xs;
    for (int i = 0; i < 3; ++i) {
        xs.push_back(tagged("d" + std::to_string(i), DamageLabel::present,
                            {tag("kat", Granularity::city, 27.71, 85.32)}));
    }
    // a message tagged city + country lands in the city's cell
    xs.push_back(tagged("d3", DamageLabel::present,
                        {tag("np", Granularity::country, 28.40, 84.10),
                         tag("kat", Granularity::city, 27.71, 85.32)}));
    // an undamaged message in the same cell counts toward messages only
    xs.push_back(tagged("ok", DamageLabel::no_info, {tag("kat", Granularity::city, 27.71, 85.32)}));
    // damage-free cells never appear
    xs.push_back(
        tagged("faraway", DamageLabel::no_info, {tag("pok", Granularity::city, 28.21, 83.99)}));

    const auto cells = crisis_map(view(xs), 0.25);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].row == 110);  // floor(27.71 / 0.25)
    CHECK(cells[0].col == 341);  // floor(85.32 / 0.25)
    CHECK(cells[0].damage_count == 4);
    CHECK(cells[0].message_count == 5);
}

TEST_CASE("crisis map with no damage is empty") {
    std::vector<TaggedMessage> xs{
        tagged("m1", DamageLabel::no_info, {tag("kat", Granularity::city)})};
    CHECK(crisis_map(view(xs), 0.25).empty());
    CHECK(crisis_map({}, 0.25).empty());
    CHECK_THROWS_AS(crisis_map({}, 0.0), ConfigError);
}

TEST_CASE("crisis map geojson carries the cell properties") {
    std::vector<TaggedMessage> xs{
        tagged("d", DamageLabel::present, {tag("kat", Granularity::city, 27.71, 85.32)})};
    const auto geojson = crisis_map_geojson(crisis_map(view(xs), 0.25), 0.25);
    CHECK(geojson.find("FeatureCollection") != std::string::npos);
    CHECK(geojson.find("damage_count") != std::string::npos);
    CHECK(geojson.find("Polygon") != std::string::npos);
}

TEST_CASE("event log validation catches broken set relationships") {
    EventLog log = log_with_counts(5, 3, 2, 2);
    CHECK_NOTHROW(log.validate());

    EventLog stray = log_with_counts(5, 3, 2, 2);
    stray.relevant[0].message.msg_id = "ghost";
    CHECK_THROWS_AS(stray.validate(), ValidationError);

    EventLog overlap = log_with_counts(5, 3, 2, 2);
    overlap.replies[0].tagged.message.msg_id = "c0";
    CHECK_THROWS_AS(overlap.validate(), ValidationError);

    EventLog negative = log_with_counts(5, 3, 2, 2);
    negative.replies[0].delta_t_min = 0.0;
    CHECK_THROWS_AS(negative.validate(), ValidationError);

    EventLog dup = log_with_counts(5, 3, 2, 2);
    dup.collected[1].msg_id = "c0";
    CHECK_THROWS_AS(dup.validate(), ValidationError);
}

TEST_CASE("reply sets split by question kind") {
    EventLog log = log_with_counts(5, 3, 4, 4);
    log.replies[0].kind = QuestionKind::ask_damage;
    log.replies[2].kind = QuestionKind::ask_damage;
    CHECK(reply_set(log, QuestionKind::ask_damage).size() == 2);
    CHECK(reply_set(log, QuestionKind::ask_geo).size() == 2);
    CHECK(relevant_set(log).size() == 3);
    CHECK(assessed_set(log).size() == 7);
}

TEST_CASE("a fully populated report round-trips through JSON") {
    EventLog log = log_with_counts(30, 12, 6, 5);
    // give the sets some texture so every metric is defined
    for (std::size_t i = 0; i < log.relevant.size(); ++i) {
        auto& tm = log.relevant[i];
        if (i % 3 == 0) tm.damage = DamageLabel::present;
        if (i % 2 == 0) tm.tags.push_back(tag("kat", Granularity::city));
        if (i % 4 == 0) tm.tags.push_back(tag("np", Granularity::country));
    }
    for (std::size_t i = 0; i < log.replies.size(); ++i) {
        auto& r = log.replies[i];
        r.kind = i % 2 == 0 ? QuestionKind::ask_geo : QuestionKind::ask_damage;
        r.delta_t_min = 2.0 + double(i);
        if (i % 2 == 0) {
            r.tagged.tags.push_back(tag("pok", Granularity::city));
            r.tagged.tags.push_back(tag("dha", Granularity::building));
        } else {
            r.tagged.damage = i % 4 == 1 ? DamageLabel::present : DamageLabel::absent_reported;
        }
    }
    log.validate();

    const MetricsReport report = build_report(log, VarietyMode::per_message);
    CHECK(report.collected == 30);
    CHECK(report.relevant == 12);
    CHECK(report.replies == 6);
    CHECK(report.reply2geo_count == 3);
    CHECK(report.reply2damage_count == 3);
    REQUIRE(report.gain.value.has_value());
    CHECK(*report.gain.value == doctest::Approx(0.5));
    REQUIRE(report.latency_min.value.has_value());
    REQUIRE(report.coverage.value.has_value());
    CHECK(*report.coverage.value > 0.0);

    const MetricsReport back = MetricsReport::from_json(report.to_json());
    CHECK(back == report);
}

TEST_CASE("an empty log reports undefined metrics with reasons") {
    EventLog log;
    log.event = event();
    const MetricsReport report = build_report(log, VarietyMode::per_message);
    CHECK_FALSE(report.gain.value.has_value());
    CHECK_FALSE(report.gain.undefined_reason.empty());
    CHECK_FALSE(report.collaborative.value.has_value());
    CHECK_FALSE(report.latency_min.value.has_value());
    CHECK_FALSE(report.density_relevant.value.has_value());
    CHECK_FALSE(report.coverage.value.has_value());
    CHECK(report.granularity_relevant.empty());
    CHECK_FALSE(report.granularity_relevant_reason.empty());
    CHECK_FALSE(report.density_test.result.has_value());

    // undefined fields survive the round trip too
    const MetricsReport back = MetricsReport::from_json(report.to_json());
    CHECK(back == report);
}

TEST_CASE("csv export is a header and one row") {
    EventLog log = log_with_counts(30, 12, 6, 5);
    const MetricsReport report = build_report(log, VarietyMode::per_message);
    const std::string csv = report_csv(report);

    const auto newline = csv.find('\n');
    REQUIRE(newline != std::string::npos);
    const std::string header = csv.substr(0, newline);
    CHECK(header.find("event") != std::string::npos);
    CHECK(header.find("collected") != std::string::npos);
    CHECK(csv.find("metrics-test") != std::string::npos);
    // exactly two lines, both terminated
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("event log directory round trip") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "qs_metrics_roundtrip";
    fs::create_directories(dir);

    EventLog log = log_with_counts(8, 4, 3, 2);
    log.relevant[1].damage = DamageLabel::present;
    log.relevant[1].tags.push_back(tag("kat", Granularity::city));
    log.replies[0].tagged.tags.push_back(tag("pok", Granularity::city));
    log.counters.dropped_by_crawl = 7;
    log.counters.expired_targets = 2;
    DispatchLogEntry entry;
    entry.question_id = "q-1";
    entry.bot_id = "b1";
    entry.target = "u1";
    entry.kind = QuestionKind::ask_geo;
    entry.sent_time = 123;
    entry.status = "sent";
    log.dispatch.push_back(entry);

    std::vector<RawMessage> platform;
    for (const auto& m : log.collected) platform.push_back(m);
    for (const auto& r : log.replies) platform.push_back(r.tagged.message);
    save_message_log((dir / "message_log.jsonl").string(), platform);
    save_dispatch_log((dir / "dispatch_log.jsonl").string(), log.dispatch);
    save_event_log(dir.string(), log);

    const EventLog loaded = load_event_log(dir.string());
    CHECK(loaded.event == log.event);
    CHECK(loaded.counters == log.counters);
    CHECK(loaded.collected.size() == log.collected.size());
    CHECK(loaded.dispatch == log.dispatch);
    CHECK(build_report(loaded, VarietyMode::per_message) ==
          build_report(log, VarietyMode::per_message));

    fs::remove_all(dir);
}

TEST_CASE("collaboration mode names round trip") {
    CHECK(collab_mode_from_string(to_string(CollabMode::simulation)) == CollabMode::simulation);
    CHECK(collab_mode_from_string(to_string(CollabMode::evaluation)) == CollabMode::evaluation);
    CHECK(variety_mode_from_string(to_string(VarietyMode::per_message)) ==
          VarietyMode::per_message);
    CHECK(variety_mode_from_string(to_string(VarietyMode::event_level)) ==
          VarietyMode::event_level);
}
