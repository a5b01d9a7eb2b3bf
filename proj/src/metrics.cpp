#include "quakesense/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "quakesense/errors.hpp"

namespace quakesense {

using ordered_json = nlohmann::ordered_json;

std::string to_string(CollabMode mode) {
    return mode == CollabMode::simulation ? "simulation" : "evaluation";
}

CollabMode collab_mode_from_string(const std::string& s) {
    if (s == "simulation") return CollabMode::simulation;
    if (s == "evaluation") return CollabMode::evaluation;
    throw ParseError("unknown collaborative mode `" + s + "`");
}

std::string to_string(VarietyMode mode) {
    return mode == VarietyMode::per_message ? "per_message" : "event_level";
}

VarietyMode variety_mode_from_string(const std::string& s) {
    if (s == "per_message") return VarietyMode::per_message;
    if (s == "event_level") return VarietyMode::event_level;
    throw ParseError("unknown variety mode `" + s + "`");
}

void EventLog::validate() const {
    std::unordered_set<std::string> collected_ids;
    collected_ids.reserve(collected.size());
    for (const auto& msg : collected) {
        if (!collected_ids.insert(msg.msg_id).second) {
            throw ValidationError("collected set has duplicate msg_id " + msg.msg_id);
        }
    }
    for (const auto& tm : relevant) {
        if (!collected_ids.count(tm.message.msg_id)) {
            throw ValidationError("relevant message " + tm.message.msg_id +
                                  " is not in the collected set");
        }
    }
    for (const auto& reply : replies) {
        if (collected_ids.count(reply.tagged.message.msg_id)) {
            throw ValidationError("reply " + reply.tagged.message.msg_id +
                                  " also appears in the collected set");
        }
        if (!(reply.delta_t_min > 0.0)) {
            throw ValidationError("reply " + reply.tagged.message.msg_id +
                                  " has non-positive delta_t");
        }
    }
}

MessageSet relevant_set(const EventLog& log) {
    MessageSet out;
    out.reserve(log.relevant.size());
    for (const auto& tm : log.relevant) out.push_back(&tm);
    return out;
}

MessageSet reply_set(const EventLog& log, QuestionKind kind) {
    MessageSet out;
    for (const auto& reply : log.replies) {
        if (reply.kind == kind) out.push_back(&reply.tagged);
    }
    return out;
}

MessageSet assessed_set(const EventLog& log) {
    MessageSet out = relevant_set(log);
    for (const auto& reply : log.replies) out.push_back(&reply.tagged);
    return out;
}

double message_gain(const EventLog& log) {
    if (log.relevant.empty()) throw MetricUndefined("message gain: no relevant messages");
    return double(log.replies.size()) / double(log.relevant.size());
}

double collaborative_rate(const EventLog& log) {
    if (log.replies.empty()) throw MetricUndefined("collaborative rate: no replies");
    std::size_t collaborative = 0;
    for (const auto& reply : log.replies) {
        if (reply.collaborative) ++collaborative;
    }
    return double(collaborative) / double(log.replies.size());
}

double mean_reply_latency(const EventLog& log) {
    if (log.replies.empty()) throw MetricUndefined("reply latency: no replies");
    double total = 0.0;
    for (const auto& reply : log.replies) total += reply.delta_t_min;
    return total / double(log.replies.size());
}

double damage_ratio(const MessageSet& set) {
    if (set.empty()) throw MetricUndefined("damage ratio: empty message set");
    std::size_t present = 0;
    for (const TaggedMessage* tm : set) {
        if (tm->damage == DamageLabel::present) ++present;
    }
    return double(present) / double(set.size());
}

double damage_info_ratio(const MessageSet& set) {
    if (set.empty()) throw MetricUndefined("damage info ratio: empty message set");
    std::size_t informative = 0;
    for (const TaggedMessage* tm : set) {
        if (tm->damage != DamageLabel::no_info) ++informative;
    }
    return double(informative) / double(set.size());
}

double place_density(const MessageSet& set) {
    if (set.empty()) throw MetricUndefined("place density: empty message set");
    std::size_t tags = 0;
    for (const TaggedMessage* tm : set) tags += tm->tags.size();
    return double(tags) / double(set.size());
}

namespace {

std::size_t distinct_places(const TaggedMessage& tm) {
    std::set<std::string> ids;
    for (const auto& tag : tm.tags) ids.insert(tag.place_id);
    return ids.size();
}

std::set<std::string> place_id_set(const MessageSet& set) {
    std::set<std::string> ids;
    for (const TaggedMessage* tm : set) {
        for (const auto& tag : tm->tags) ids.insert(tag.place_id);
    }
    return ids;
}

}  // namespace

double place_variety(const MessageSet& set, VarietyMode mode) {
    if (set.empty()) throw MetricUndefined("place variety: empty message set");
    if (mode == VarietyMode::per_message) {
        double total = 0.0;
        for (const TaggedMessage* tm : set) total += double(distinct_places(*tm));
        return total / double(set.size());
    }
    return double(place_id_set(set).size()) / double(set.size());
}

double coverage_gain(const MessageSet& reply2geo, const MessageSet& relevant) {
    const auto known = place_id_set(relevant);
    if (known.empty()) throw MetricUndefined("coverage gain: no places known from relevant messages");
    const auto reply_places = place_id_set(reply2geo);
    std::size_t fresh = 0;
    for (const auto& id : reply_places) {
        if (!known.count(id)) ++fresh;
    }
    return double(fresh) / double(known.size());
}

std::map<Granularity, double> granularity_distribution(const MessageSet& set) {
    std::size_t total = 0;
    std::map<Granularity, std::size_t> counts;
    for (const TaggedMessage* tm : set) {
        for (const auto& tag : tm->tags) {
            ++counts[tag.granularity];
            ++total;
        }
    }
    if (total == 0) throw MetricUndefined("granularity distribution: no place tags in set");
    std::map<Granularity, double> out;
    for (const Granularity g : {Granularity::building, Granularity::city, Granularity::region,
                                Granularity::country, Granularity::other}) {
        out[g] = double(counts[g]) / double(total);
    }
    return out;
}

int round_percent(double ratio) {
    // nearbyint under the default rounding mode is half-to-even
    return int(std::nearbyint(ratio * 100.0));
}

std::string format_gain(double ratio) {
    const int pct = round_percent(ratio);
    return (pct >= 0 ? "+" : "") + std::to_string(pct) + "%";
}

std::string format_percent(double ratio) {
    return std::to_string(round_percent(ratio)) + "%";
}

namespace {

const PlaceTag* finest_tag(const TaggedMessage& tm) {
    const PlaceTag* best = nullptr;
    for (const auto& tag : tm.tags) {
        if (best == nullptr || granularity_rank(tag.granularity) < granularity_rank(best->granularity)) {
            best = &tag;
        }
    }
    return best;
}

std::int64_t grid_floor(double degrees, double cell_deg) {
    return std::int64_t(std::floor(degrees / cell_deg));
}

}  // namespace

std::vector<CrisisCell> crisis_map(const MessageSet& assessed, double cell_deg) {
    if (!(cell_deg > 0.0)) throw ConfigError("crisis map cell size must be positive");
    std::map<std::pair<std::int64_t, std::int64_t>, CrisisCell> cells;
    for (const TaggedMessage* tm : assessed) {
        const PlaceTag* tag = finest_tag(*tm);
        if (tag == nullptr) continue;
        const auto key = std::make_pair(grid_floor(tag->position.lat, cell_deg),
                                        grid_floor(tag->position.lon, cell_deg));
        auto& cell = cells[key];
        cell.row = key.first;
        cell.col = key.second;
        ++cell.message_count;
        if (tm->damage == DamageLabel::present) ++cell.damage_count;
    }
    std::vector<CrisisCell> out;
    out.reserve(cells.size());
    for (const auto& [key, cell] : cells) {
        if (cell.damage_count > 0) out.push_back(cell);
    }
    return out;
}

std::string crisis_map_geojson(const std::vector<CrisisCell>& cells, double cell_deg) {
    if (!(cell_deg > 0.0)) throw ConfigError("crisis map cell size must be positive");
    ordered_json features = ordered_json::array();
    for (const auto& cell : cells) {
        const double lat0 = double(cell.row) * cell_deg;
        const double lon0 = double(cell.col) * cell_deg;
        const double lat1 = lat0 + cell_deg;
        const double lon1 = lon0 + cell_deg;
        ordered_json feature;
        feature["type"] = "Feature";
        feature["geometry"] = {
            {"type", "Polygon"},
            {"coordinates", ordered_json::array({ordered_json::array(
                                {ordered_json::array({lon0, lat0}), ordered_json::array({lon1, lat0}),
                                 ordered_json::array({lon1, lat1}), ordered_json::array({lon0, lat1}),
                                 ordered_json::array({lon0, lat0})})})},
        };
        feature["properties"] = {{"row", cell.row},
                                 {"col", cell.col},
                                 {"damage_count", cell.damage_count},
                                 {"message_count", cell.message_count}};
        features.push_back(std::move(feature));
    }
    ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = std::move(features);
    return doc.dump(2) + "\n";
}

namespace {

template <typename Fn>
MetricValue guarded(Fn&& fn) {
    try {
        return MetricValue{std::forward<Fn>(fn)(), ""};
    } catch (const MetricUndefined& e) {
        return MetricValue{std::nullopt, e.what()};
    }
}

std::vector<double> tag_counts(const MessageSet& set) {
    std::vector<double> out;
    out.reserve(set.size());
    for (const TaggedMessage* tm : set) out.push_back(double(tm->tags.size()));
    return out;
}

std::vector<double> distinct_counts(const MessageSet& set) {
    std::vector<double> out;
    out.reserve(set.size());
    for (const TaggedMessage* tm : set) out.push_back(double(distinct_places(*tm)));
    return out;
}

std::vector<double> damage_indicators(const MessageSet& set) {
    std::vector<double> out;
    out.reserve(set.size());
    for (const TaggedMessage* tm : set) {
        out.push_back(tm->damage == DamageLabel::present ? 1.0 : 0.0);
    }
    return out;
}

SignificanceField run_test(const std::vector<double>& a, const std::vector<double>& b,
                           const char* what) {
    SignificanceField field;
    if (a.size() < 2 || b.size() < 2) {
        field.undefined_reason = std::string(what) + ": both samples need at least 2 values";
        return field;
    }
    try {
        field.result = welch_t_test(a, b);
    } catch (const ValidationError& e) {
        field.undefined_reason = std::string(what) + ": " + e.what();
    }
    return field;
}

}  // namespace

MetricsReport build_report(const EventLog& log, VarietyMode variety_mode) {
    log.validate();
    MetricsReport report;
    report.event_id = log.event.event_id;
    report.place_name = log.event.place_name;
    report.magnitude = log.event.magnitude;
    report.depth_km = log.event.depth_km;
    report.mode = log.mode;
    report.counters = log.counters;
    report.variety_mode = variety_mode;

    const MessageSet relevant = relevant_set(log);
    const MessageSet reply2damage = reply_set(log, QuestionKind::ask_damage);
    const MessageSet reply2geo = reply_set(log, QuestionKind::ask_geo);

    report.collected = log.collected.size();
    report.relevant = relevant.size();
    report.replies = log.replies.size();
    report.reply2damage_count = reply2damage.size();
    report.reply2geo_count = reply2geo.size();

    report.gain = guarded([&] { return message_gain(log); });
    report.collaborative = guarded([&] { return collaborative_rate(log); });
    report.latency_min = guarded([&] { return mean_reply_latency(log); });
    report.damage_ratio_relevant = guarded([&] { return damage_ratio(relevant); });
    report.damage_ratio_reply2damage = guarded([&] { return damage_ratio(reply2damage); });
    report.damage_info = guarded([&] { return damage_info_ratio(reply2damage); });
    report.density_relevant = guarded([&] { return place_density(relevant); });
    report.density_reply2geo = guarded([&] { return place_density(reply2geo); });
    report.variety_relevant = guarded([&] { return place_variety(relevant, variety_mode); });
    report.variety_reply2geo = guarded([&] { return place_variety(reply2geo, variety_mode); });
    report.coverage = guarded([&] { return coverage_gain(reply2geo, relevant); });

    try {
        for (const auto& [g, frac] : granularity_distribution(relevant)) {
            report.granularity_relevant[to_string(g)] = frac;
        }
    } catch (const MetricUndefined& e) {
        report.granularity_relevant_reason = e.what();
    }
    try {
        for (const auto& [g, frac] : granularity_distribution(reply2geo)) {
            report.granularity_reply2geo[to_string(g)] = frac;
        }
    } catch (const MetricUndefined& e) {
        report.granularity_reply2geo_reason = e.what();
    }

    report.density_test = run_test(tag_counts(reply2geo), tag_counts(relevant), "place density test");
    report.variety_test =
        run_test(distinct_counts(reply2geo), distinct_counts(relevant), "place variety test");
    report.damage_test =
        run_test(damage_indicators(reply2damage), damage_indicators(relevant), "damage ratio test");
    return report;
}

namespace {

ordered_json metric_to_json(const MetricValue& metric) {
    if (metric.value) return ordered_json{{"value", *metric.value}};
    return ordered_json{{"undefined", metric.undefined_reason}};
}

ordered_json metric_to_json(const MetricValue& metric, const std::string& formatted) {
    if (!metric.value) return ordered_json{{"undefined", metric.undefined_reason}};
    return ordered_json{{"value", *metric.value}, {"formatted", formatted}};
}

MetricValue metric_from_json(const ordered_json& node) {
    MetricValue out;
    if (node.contains("value")) {
        out.value = node.at("value").get<double>();
    } else {
        out.undefined_reason = node.at("undefined").get<std::string>();
    }
    return out;
}

ordered_json significance_to_json(const SignificanceField& field) {
    if (!field.result) return ordered_json{{"undefined", field.undefined_reason}};
    return ordered_json{{"t", field.result->t},
                        {"df", field.result->df},
                        {"p", field.result->p},
                        {"stars", field.result->stars}};
}

SignificanceField significance_from_json(const ordered_json& node) {
    SignificanceField out;
    if (node.contains("undefined")) {
        out.undefined_reason = node.at("undefined").get<std::string>();
        return out;
    }
    SignificanceResult r;
    r.t = node.at("t").get<double>();
    r.df = node.at("df").get<double>();
    r.p = node.at("p").get<double>();
    r.stars = node.at("stars").get<std::string>();
    out.result = r;
    return out;
}

ordered_json granularity_to_json(const std::map<std::string, double>& dist,
                                 const std::string& reason) {
    if (dist.empty()) return ordered_json{{"undefined", reason}};
    ordered_json node;
    for (const Granularity g : {Granularity::building, Granularity::city, Granularity::region,
                                Granularity::country, Granularity::other}) {
        const auto it = dist.find(to_string(g));
        node[to_string(g)] = it == dist.end() ? 0.0 : it->second;
    }
    return node;
}

}  // namespace

std::string MetricsReport::to_json() const {
    ordered_json doc;
    doc["event"] = {{"event_id", event_id},
                    {"place", place_name},
                    {"magnitude", magnitude},
                    {"depth_km", depth_km}};
    doc["mode"] = quakesense::to_string(mode);
    doc["counts"] = {{"collected", collected},
                     {"relevant", relevant},
                     {"replies", replies},
                     {"reply2damage", reply2damage_count},
                     {"reply2geo", reply2geo_count},
                     {"questions_sent", counters.questions_sent},
                     {"dropped_by_crawl", counters.dropped_by_crawl},
                     {"expired_targets", counters.expired_targets},
                     {"duplicate_suppressed", counters.duplicate_suppressed},
                     {"late_replies", counters.late_replies},
                     {"orphan_replies", counters.orphan_replies}};
    doc["message_gain"] = gain.value ? metric_to_json(gain, format_gain(*gain.value))
                                     : metric_to_json(gain);
    doc["collaborative_rate"] = collaborative.value
                                    ? metric_to_json(collaborative, format_percent(*collaborative.value))
                                    : metric_to_json(collaborative);
    doc["mean_reply_latency_min"] = metric_to_json(latency_min);
    doc["damage_ratio"] = {{"relevant", metric_to_json(damage_ratio_relevant)},
                           {"reply2damage", metric_to_json(damage_ratio_reply2damage)}};
    doc["damage_info_ratio"] = metric_to_json(damage_info);
    doc["place_density"] = {{"relevant", metric_to_json(density_relevant)},
                            {"reply2geo", metric_to_json(density_reply2geo)}};
    doc["place_variety"] = {{"mode", quakesense::to_string(variety_mode)},
                            {"relevant", metric_to_json(variety_relevant)},
                            {"reply2geo", metric_to_json(variety_reply2geo)}};
    doc["coverage_gain"] = metric_to_json(coverage);
    doc["granularity_distribution"] = {
        {"relevant", granularity_to_json(granularity_relevant, granularity_relevant_reason)},
        {"reply2geo", granularity_to_json(granularity_reply2geo, granularity_reply2geo_reason)}};
    doc["significance"] = {{"place_density", significance_to_json(density_test)},
                           {"place_variety", significance_to_json(variety_test)},
                           {"damage_ratio", significance_to_json(damage_test)}};
    return doc.dump(2) + "\n";
}

MetricsReport MetricsReport::from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("report is not valid JSON: ") + e.what());
    }
    try {
        MetricsReport report;
        const auto& event = doc.at("event");
        report.event_id = event.at("event_id").get<std::string>();
        report.place_name = event.at("place").get<std::string>();
        report.magnitude = event.at("magnitude").get<double>();
        report.depth_km = event.at("depth_km").get<double>();
        report.mode = collab_mode_from_string(doc.at("mode").get<std::string>());
        const auto& counts = doc.at("counts");
        report.collected = counts.at("collected").get<std::size_t>();
        report.relevant = counts.at("relevant").get<std::size_t>();
        report.replies = counts.at("replies").get<std::size_t>();
        report.reply2damage_count = counts.at("reply2damage").get<std::size_t>();
        report.reply2geo_count = counts.at("reply2geo").get<std::size_t>();
        report.counters.questions_sent = counts.at("questions_sent").get<std::size_t>();
        report.counters.dropped_by_crawl = counts.at("dropped_by_crawl").get<std::size_t>();
        report.counters.expired_targets = counts.at("expired_targets").get<std::size_t>();
        report.counters.duplicate_suppressed = counts.at("duplicate_suppressed").get<std::size_t>();
        report.counters.late_replies = counts.at("late_replies").get<std::size_t>();
        report.counters.orphan_replies = counts.at("orphan_replies").get<std::size_t>();
        report.gain = metric_from_json(doc.at("message_gain"));
        report.collaborative = metric_from_json(doc.at("collaborative_rate"));
        report.latency_min = metric_from_json(doc.at("mean_reply_latency_min"));
        report.damage_ratio_relevant = metric_from_json(doc.at("damage_ratio").at("relevant"));
        report.damage_ratio_reply2damage =
            metric_from_json(doc.at("damage_ratio").at("reply2damage"));
        report.damage_info = metric_from_json(doc.at("damage_info_ratio"));
        report.density_relevant = metric_from_json(doc.at("place_density").at("relevant"));
        report.density_reply2geo = metric_from_json(doc.at("place_density").at("reply2geo"));
        report.variety_mode =
            variety_mode_from_string(doc.at("place_variety").at("mode").get<std::string>());
        report.variety_relevant = metric_from_json(doc.at("place_variety").at("relevant"));
        report.variety_reply2geo = metric_from_json(doc.at("place_variety").at("reply2geo"));
        report.coverage = metric_from_json(doc.at("coverage_gain"));
        const auto read_granularity = [](const ordered_json& node,
                                         std::map<std::string, double>& dist, std::string& reason) {
            if (node.contains("undefined")) {
                reason = node.at("undefined").get<std::string>();
                return;
            }
            for (const auto& [key, value] : node.items()) dist[key] = value.get<double>();
        };
        read_granularity(doc.at("granularity_distribution").at("relevant"),
                         report.granularity_relevant, report.granularity_relevant_reason);
        read_granularity(doc.at("granularity_distribution").at("reply2geo"),
                         report.granularity_reply2geo, report.granularity_reply2geo_reason);
        report.density_test = significance_from_json(doc.at("significance").at("place_density"));
        report.variety_test = significance_from_json(doc.at("significance").at("place_variety"));
        report.damage_test = significance_from_json(doc.at("significance").at("damage_ratio"));
        return report;
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("report schema mismatch: ") + e.what());
    }
}

std::string report_csv(const MetricsReport& report) {
    std::ostringstream out;
    out << "event_id,place,magnitude,depth_km,collected,relevant,replies,"
           "collaborative_pct,gain_pct,mean_latency_min\n";
    std::string place = report.place_name;
    // RFC-ish escaping: wrap in quotes, double inner quotes
    std::string escaped;
    escaped.reserve(place.size() + 2);
    escaped += '"';
    for (const char c : place) {
        if (c == '"') escaped += '"';
        escaped += c;
    }
    escaped += '"';
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.1f,%.1f", report.magnitude, report.depth_km);
    out << report.event_id << ',' << escaped << ',' << buffer << ',' << report.collected << ','
        << report.relevant << ',' << report.replies << ',';
    if (report.collaborative.value) out << round_percent(*report.collaborative.value);
    out << ',';
    if (report.gain.value) out << format_gain(*report.gain.value);
    out << ',';
    if (report.latency_min.value) {
        std::snprintf(buffer, sizeof buffer, "%.1f", *report.latency_min.value);
        out << buffer;
    }
    out << '\n';
    return out.str();
}

namespace {

ordered_json tag_to_json(const PlaceTag& tag) {
    return ordered_json{{"surface", tag.surface},
                        {"begin", tag.begin},
                        {"end", tag.end},
                        {"place_id", tag.place_id},
                        {"lat", tag.position.lat},
                        {"lon", tag.position.lon},
                        {"granularity", to_string(tag.granularity)}};
}

PlaceTag tag_from_json(const ordered_json& node) {
    PlaceTag tag;
    tag.surface = node.at("surface").get<std::string>();
    tag.begin = node.at("begin").get<std::size_t>();
    tag.end = node.at("end").get<std::size_t>();
    tag.place_id = node.at("place_id").get<std::string>();
    tag.position.lat = node.at("lat").get<double>();
    tag.position.lon = node.at("lon").get<double>();
    tag.granularity = granularity_from_string(node.at("granularity").get<std::string>());
    return tag;
}

ordered_json tags_to_json(const std::vector<PlaceTag>& tags) {
    ordered_json arr = ordered_json::array();
    for (const auto& tag : tags) arr.push_back(tag_to_json(tag));
    return arr;
}

std::vector<PlaceTag> tags_from_json(const ordered_json& arr) {
    std::vector<PlaceTag> tags;
    tags.reserve(arr.size());
    for (const auto& node : arr) tags.push_back(tag_from_json(node));
    return tags;
}

}  // namespace

void save_event_log(const std::string& dir, const EventLog& log) {
    ordered_json doc;
    doc["event"] = {{"event_id", log.event.event_id},
                    {"magnitude", log.event.magnitude},
                    {"depth_km", log.event.depth_km},
                    {"lat", log.event.epicenter.lat},
                    {"lon", log.event.epicenter.lon},
                    {"origin_time_ms", log.event.origin_time_ms},
                    {"place", log.event.place_name}};
    doc["mode"] = to_string(log.mode);
    doc["counters"] = {{"dropped_by_crawl", log.counters.dropped_by_crawl},
                       {"expired_targets", log.counters.expired_targets},
                       {"duplicate_suppressed", log.counters.duplicate_suppressed},
                       {"questions_sent", log.counters.questions_sent},
                       {"late_replies", log.counters.late_replies},
                       {"orphan_replies", log.counters.orphan_replies}};
    ordered_json collected = ordered_json::array();
    for (const auto& msg : log.collected) collected.push_back(msg.msg_id);
    doc["collected"] = std::move(collected);
    ordered_json relevant = ordered_json::array();
    for (const auto& tm : log.relevant) {
        relevant.push_back(ordered_json{{"msg_id", tm.message.msg_id},
                                        {"damage", to_string(tm.damage)},
                                        {"tags", tags_to_json(tm.tags)}});
    }
    doc["relevant"] = std::move(relevant);
    ordered_json replies = ordered_json::array();
    for (const auto& reply : log.replies) {
        replies.push_back(ordered_json{{"msg_id", reply.tagged.message.msg_id},
                                       {"question_id", reply.question_id},
                                       {"kind", to_string(reply.kind)},
                                       {"delta_t_min", reply.delta_t_min},
                                       {"collaborative", reply.collaborative},
                                       {"damage", to_string(reply.tagged.damage)},
                                       {"tags", tags_to_json(reply.tagged.tags)}});
    }
    doc["replies"] = std::move(replies);
    std::ofstream out(dir + "/event_log.json", std::ios::binary);
    if (!out) throw ParseError("cannot open `" + dir + "/event_log.json` for writing");
    out << doc.dump(2) << '\n';
}

EventLog load_event_log(const std::string& dir) {
    const auto messages = load_message_log(dir + "/message_log.jsonl");
    std::unordered_map<std::string, const RawMessage*> by_id;
    by_id.reserve(messages.size());
    for (const auto& msg : messages) by_id.emplace(msg.msg_id, &msg);
    const auto lookup = [&](const std::string& msg_id) -> const RawMessage& {
        const auto it = by_id.find(msg_id);
        if (it == by_id.end()) {
            throw ValidationError("event log references unknown message " + msg_id);
        }
        return *it->second;
    };

    std::ifstream in(dir + "/event_log.json", std::ios::binary);
    if (!in) throw ParseError("cannot open event log `" + dir + "/event_log.json`");
    std::stringstream buffer;
    buffer << in.rdbuf();
    ordered_json doc;
    try {
        doc = ordered_json::parse(buffer.str());
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("event log is not valid JSON: ") + e.what());
    }

    try {
        EventLog log;
        const auto& event = doc.at("event");
        log.event.event_id = event.at("event_id").get<std::string>();
        log.event.magnitude = event.at("magnitude").get<double>();
        log.event.depth_km = event.at("depth_km").get<double>();
        log.event.epicenter.lat = event.at("lat").get<double>();
        log.event.epicenter.lon = event.at("lon").get<double>();
        log.event.origin_time_ms = event.at("origin_time_ms").get<std::int64_t>();
        log.event.place_name = event.at("place").get<std::string>();
        log.mode = collab_mode_from_string(doc.at("mode").get<std::string>());
        const auto& counters = doc.at("counters");
        log.counters.dropped_by_crawl = counters.at("dropped_by_crawl").get<std::size_t>();
        log.counters.expired_targets = counters.at("expired_targets").get<std::size_t>();
        log.counters.duplicate_suppressed = counters.at("duplicate_suppressed").get<std::size_t>();
        log.counters.questions_sent = counters.at("questions_sent").get<std::size_t>();
        log.counters.late_replies = counters.at("late_replies").get<std::size_t>();
        log.counters.orphan_replies = counters.at("orphan_replies").get<std::size_t>();
        for (const auto& node : doc.at("collected")) {
            log.collected.push_back(lookup(node.get<std::string>()));
        }
        for (const auto& node : doc.at("relevant")) {
            TaggedMessage tm;
            tm.message = lookup(node.at("msg_id").get<std::string>());
            tm.damage = damage_label_from_string(node.at("damage").get<std::string>());
            tm.tags = tags_from_json(node.at("tags"));
            log.relevant.push_back(std::move(tm));
        }
        for (const auto& node : doc.at("replies")) {
            ReplyRecord reply;
            reply.tagged.message = lookup(node.at("msg_id").get<std::string>());
            reply.tagged.damage = damage_label_from_string(node.at("damage").get<std::string>());
            reply.tagged.tags = tags_from_json(node.at("tags"));
            reply.question_id = node.at("question_id").get<std::string>();
            reply.kind = question_kind_from_string(node.at("kind").get<std::string>());
            reply.delta_t_min = node.at("delta_t_min").get<double>();
            reply.collaborative = node.at("collaborative").get<bool>();
            log.replies.push_back(std::move(reply));
        }
        log.dispatch = load_dispatch_log(dir + "/dispatch_log.jsonl");
        return log;
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("event log schema mismatch: ") + e.what());
    }
}

}  // namespace quakesense
