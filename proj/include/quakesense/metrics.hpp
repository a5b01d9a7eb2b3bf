#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quakesense/dispatch.hpp"
#include "quakesense/feed.hpp"
#include "quakesense/geoparse.hpp"
#include "quakesense/stats.hpp"
#include "quakesense/types.hpp"

namespace quakesense {

// A message after analysis: damage verdict plus resolved place tags.
struct TaggedMessage {
    RawMessage message;
    DamageLabel damage = DamageLabel::no_info;
    std::vector<PlaceTag> tags;
};

struct ReplyRecord {
    TaggedMessage tagged;
    std::string question_id;
    QuestionKind kind = QuestionKind::ask_geo;
    double delta_t_min = 0.0;
    bool collaborative = false;
};

struct LogCounters {
    std::size_t dropped_by_crawl = 0;
    std::size_t expired_targets = 0;
    std::size_t duplicate_suppressed = 0;
    std::size_t questions_sent = 0;
    std::size_t late_replies = 0;
    std::size_t orphan_replies = 0;

    bool operator==(const LogCounters&) const = default;
};

// Which signal fills replies' `collaborative`: ground truth (simulation) or
// the classifiers (evaluation).
enum class CollabMode { simulation, evaluation };

std::string to_string(CollabMode mode);
CollabMode collab_mode_from_string(const std::string& s);

struct EventLog {
    EarthquakeEvent event;
    CollabMode mode = CollabMode::simulation;
    std::vector<RawMessage> collected;
    std::vector<TaggedMessage> relevant;
    std::vector<ReplyRecord> replies;
    std::vector<DispatchLogEntry> dispatch;
    LogCounters counters;

    // Throws ValidationError when set relationships are broken (relevant must
    // be a subset of collected, replies disjoint from it, delta_t positive).
    void validate() const;
};

// Borrowed view used by the per-set metrics.
using MessageSet = std::vector<const TaggedMessage*>;

MessageSet relevant_set(const EventLog& log);
MessageSet reply_set(const EventLog& log, QuestionKind kind);
MessageSet assessed_set(const EventLog& log);  // relevant + every reply

// Whole-event ratios. All throw MetricUndefined when their precondition
// fails (zero denominator), naming the reason.
double message_gain(const EventLog& log);       // replies / relevant
double collaborative_rate(const EventLog& log); // collaborative replies / replies
double mean_reply_latency(const EventLog& log); // minutes

// Per-set measures.
double damage_ratio(const MessageSet& set);
double damage_info_ratio(const MessageSet& set);
double place_density(const MessageSet& set);

enum class VarietyMode { per_message, event_level };
std::string to_string(VarietyMode mode);
VarietyMode variety_mode_from_string(const std::string& s);

double place_variety(const MessageSet& set, VarietyMode mode);
double coverage_gain(const MessageSet& reply2geo, const MessageSet& relevant);
std::map<Granularity, double> granularity_distribution(const MessageSet& set);

// Whole-percent rounding, half to even: 0.196 -> 20.
int round_percent(double ratio);
std::string format_gain(double ratio);     // "+20%"
std::string format_percent(double ratio);  // "78%"

struct CrisisCell {
    std::int64_t row = 0;  // floor(lat / cell_deg)
    std::int64_t col = 0;  // floor(lon / cell_deg)
    std::size_t damage_count = 0;
    std::size_t message_count = 0;

    bool operator==(const CrisisCell&) const = default;
};

// Grid aggregation: every message with at least one tag is binned at its
// finest-granularity tag; only cells holding at least one damage-present
// message are emitted, ordered by (row, col).
std::vector<CrisisCell> crisis_map(const MessageSet& assessed, double cell_deg);
std::string crisis_map_geojson(const std::vector<CrisisCell>& cells, double cell_deg);

struct MetricValue {
    std::optional<double> value;
    std::string undefined_reason;  // non-empty exactly when value is empty

    bool operator==(const MetricValue&) const = default;
};

struct SignificanceField {
    std::optional<SignificanceResult> result;
    std::string undefined_reason;

    bool operator==(const SignificanceField&) const = default;
};

struct MetricsReport {
    std::string event_id;
    std::string place_name;
    double magnitude = 0.0;
    double depth_km = 0.0;
    CollabMode mode = CollabMode::simulation;

    std::size_t collected = 0;
    std::size_t relevant = 0;
    std::size_t replies = 0;
    std::size_t reply2damage_count = 0;
    std::size_t reply2geo_count = 0;
    LogCounters counters;

    MetricValue gain;
    MetricValue collaborative;
    MetricValue latency_min;
    MetricValue damage_ratio_relevant;
    MetricValue damage_ratio_reply2damage;
    MetricValue damage_info;
    MetricValue density_relevant;
    MetricValue density_reply2geo;
    VarietyMode variety_mode = VarietyMode::per_message;
    MetricValue variety_relevant;
    MetricValue variety_reply2geo;
    MetricValue coverage;

    std::map<std::string, double> granularity_relevant;
    std::string granularity_relevant_reason;  // non-empty when map is empty
    std::map<std::string, double> granularity_reply2geo;
    std::string granularity_reply2geo_reason;

    // reply2geo vs relevant place counts / distinct place counts, and
    // reply2damage vs relevant damage indicators
    SignificanceField density_test;
    SignificanceField variety_test;
    SignificanceField damage_test;

    bool operator==(const MetricsReport&) const = default;

    std::string to_json() const;
    static MetricsReport from_json(const std::string& text);
};

MetricsReport build_report(const EventLog& log, VarietyMode variety_mode);

// Table-style one-row summary (header + row).
std::string report_csv(const MetricsReport& report);

// Directory round trip used by the report command: `event_log.json` holds the
// structure (ids, tags, verdicts, counters), `message_log.jsonl` the message
// content; the loader joins the two.
void save_event_log(const std::string& dir, const EventLog& log);
EventLog load_event_log(const std::string& dir);

}  // namespace quakesense
