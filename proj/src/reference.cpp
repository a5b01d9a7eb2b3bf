#include "quakesense/reference.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "quakesense/errors.hpp"
#include "quakesense/rng.hpp"

namespace quakesense {

namespace {

std::vector<std::string> lowered_tokens(const std::string& text) {
    std::vector<std::string> out;
    for (auto& tok : tokenize_with_offsets(text)) out.push_back(std::move(tok.lowered));
    return out;
}

struct TieKey {
    double distance;
    double population_order;  // lower value = preferred
    int rank;
    const std::string* place_id;
};

TieKey make_key(const GazetteerEntry& entry, const std::optional<LatLon>& epicenter,
                bool corrupt) {
    TieKey key;
    key.distance =
        (!corrupt && epicenter) ? haversine_km(entry.position, *epicenter) : 0.0;
    key.population_order =
        corrupt ? double(entry.population) : -double(entry.population);
    key.rank = granularity_rank(entry.granularity);
    key.place_id = &entry.place_id;
    return key;
}

bool key_before(const TieKey& a, const TieKey& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.population_order != b.population_order) return a.population_order < b.population_order;
    if (a.rank != b.rank) return a.rank < b.rank;
    return *a.place_id < *b.place_id;
}

}  // namespace

NaiveGeoparser::NaiveGeoparser(const Gazetteer& gazetteer, bool corrupt_tie_rule)
    : gazetteer_(&gazetteer), corrupt_(corrupt_tie_rule) {
    const auto& entries = gazetteer.entries();
    for (std::size_t ei = 0; ei < entries.size(); ++ei) {
        auto name_tokens = lowered_tokens(entries[ei].name);
        if (!name_tokens.empty()) patterns_.emplace_back(ei, std::move(name_tokens));
        for (const auto& alias : entries[ei].aliases) {
            auto alias_tokens = lowered_tokens(alias);
            if (!alias_tokens.empty()) patterns_.emplace_back(ei, std::move(alias_tokens));
        }
    }
}

std::vector<PlaceTag> NaiveGeoparser::parse(const std::string& text,
                                            std::optional<LatLon> epicenter) const {
    const auto tokens = tokenize_with_offsets(text);
    const auto& entries = gazetteer_->entries();
    std::vector<PlaceTag> tags;

    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t best_len = 0;
        std::vector<std::size_t> candidates;
        for (const auto& [entry_index, pattern] : patterns_) {
            if (pattern.size() > tokens.size() - i || pattern.size() < best_len) continue;
            bool matches = true;
            for (std::size_t k = 0; k < pattern.size(); ++k) {
                if (tokens[i + k].lowered != pattern[k]) {
                    matches = false;
                    break;
                }
            }
            if (!matches) continue;
            if (pattern.size() > best_len) {
                best_len = pattern.size();
                candidates.clear();
            }
            candidates.push_back(entry_index);
        }
        if (best_len == 0) {
            ++i;
            continue;
        }
        std::size_t chosen = candidates[0];
        TieKey chosen_key = make_key(entries[chosen], epicenter, corrupt_);
        for (std::size_t k = 1; k < candidates.size(); ++k) {
            const TieKey key = make_key(entries[candidates[k]], epicenter, corrupt_);
            if (key_before(key, chosen_key)) {
                chosen = candidates[k];
                chosen_key = key;
            }
        }
        PlaceTag tag;
        tag.begin = tokens[i].begin;
        tag.end = tokens[i + best_len - 1].end;
        tag.surface = text.substr(tag.begin, tag.end - tag.begin);
        tag.place_id = entries[chosen].place_id;
        tag.position = entries[chosen].position;
        tag.granularity = entries[chosen].granularity;
        tags.push_back(std::move(tag));
        i += best_len;
    }
    return tags;
}

std::vector<PlaceTag> naive_geoparse(const std::string& text, const Gazetteer& gazetteer,
                                     std::optional<LatLon> epicenter, bool corrupt_tie_rule) {
    return NaiveGeoparser(gazetteer, corrupt_tie_rule).parse(text, epicenter);
}

double pairwise_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size()) {
        throw ValidationError("pairwise_auc: scores and labels differ in length");
    }
    std::vector<double> positives;
    std::vector<double> negatives;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        (labels[i] ? positives : negatives).push_back(scores[i]);
    }
    if (positives.empty() || negatives.empty()) {
        throw ValidationError("pairwise_auc: need at least one positive and one negative");
    }
    double concordant = 0.0;
    for (const double p : positives) {
        for (const double n : negatives) {
            if (p > n) {
                concordant += 1.0;
            } else if (p == n) {
                concordant += 0.5;
            }
        }
    }
    return concordant / (double(positives.size()) * double(negatives.size()));
}

namespace {

// Two-sided tail of Student's t by composite Simpson over [0, |t|].
double t_two_sided_p(double t_abs, double df) {
    if (t_abs == 0.0) return 1.0;
    const double log_norm =
        std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * M_PI);
    const auto density = [&](double x) {
        return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(x * x / df));
    };
    const int panels = 20000;  // even
    const double h = t_abs / panels;
    double sum = density(0.0) + density(t_abs);
    for (int k = 1; k < panels; ++k) {
        sum += density(h * k) * (k % 2 == 1 ? 4.0 : 2.0);
    }
    const double integral = sum * h / 3.0;
    return std::max(0.0, 1.0 - 2.0 * integral);
}

}  // namespace

SignificanceResult welch_reference(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw ValidationError("welch_reference: each sample needs at least 2 values");
    }
    const double na = double(a.size());
    const double nb = double(b.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / na;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / nb;
    double va = 0.0;
    for (const double x : a) va += (x - ma) * (x - ma);
    va /= na - 1.0;
    double vb = 0.0;
    for (const double x : b) vb += (x - mb) * (x - mb);
    vb /= nb - 1.0;
    if (va <= 0.0 && vb <= 0.0) {
        // mirrors the production convention for identical samples
        if (ma == mb) return {0.0, na + nb - 2.0, 1.0, "ns"};
        throw ValidationError("welch_reference: both samples have zero variance");
    }
    const double ua = va / na;
    const double ub = vb / nb;
    const double t = (ma - mb) / std::sqrt(ua + ub);
    const double df = (ua + ub) * (ua + ub) / (ua * ua / (na - 1.0) + ub * ub / (nb - 1.0));
    const double p = std::min(1.0, t_two_sided_p(std::fabs(t), df));
    return {t, df, p, significance_stars(p)};
}

// ---------------------------------------------------------------------------
// Randomized equivalence harness
// ---------------------------------------------------------------------------

namespace {

bool close(double a, double b) {
    return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

bool same_defined(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || close(*a, *b);
}

std::string show(const std::optional<double>& v) {
    if (!v) return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
}

// --- geoparse case generation ---

const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words{
        "felt",  "shaking", "here",   "strong", "just",   "now",    "again", "really",
        "the",   "whole",   "house",  "moved",  "scary",  "ok",     "fine",  "news",
        "says",  "big",     "one",    "near",   "around", "heard",  "loud",  "rumble",
        "woke",  "up",      "power",  "out",    "stay",   "safe",   "all",   "good",
        "check", "on",      "family", "please", "report", "damage", "roads", "closed"};
    return words;
}

std::string mutate_case(const std::string& s, Rng& rng) {
    std::string out = s;
    for (char& c : out) {
        if (rng.bernoulli(0.3)) c = char(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

struct TextCase {
    std::string text;
    std::optional<LatLon> epicenter;
};

TextCase random_text_case(Rng& rng, const Gazetteer& gazetteer,
                          const std::vector<std::size_t>& ambiguous_pool) {
    const auto& entries = gazetteer.entries();
    static const std::vector<std::string> joiners{" ", " ", ", ", "! ", " - ", "  ", "... "};
    std::string text;
    const std::size_t segments = 3 + rng.below(8);
    for (std::size_t s = 0; s < segments; ++s) {
        if (s > 0) text += joiners[rng.below(joiners.size())];
        const double r = rng.uniform01();
        if (r < 0.35 || entries.empty()) {
            text += filler_words()[rng.below(filler_words().size())];
            continue;
        }
        if (r < 0.55 && !ambiguous_pool.empty()) {
            const auto& entry = entries[ambiguous_pool[rng.below(ambiguous_pool.size())]];
            text += mutate_case(entry.name, rng);
            continue;
        }
        const auto& entry = entries[rng.below(entries.size())];
        if (r < 0.85) {
            if (!entry.aliases.empty() && rng.bernoulli(0.3)) {
                text += mutate_case(entry.aliases[rng.below(entry.aliases.size())], rng);
            } else {
                text += mutate_case(entry.name, rng);
            }
        } else if (r < 0.92) {
            text += mutate_case(entry.name, rng) + "s";  // boundary stress
        } else {
            // first token only; may or may not be a name by itself
            const auto toks = tokenize_with_offsets(entry.name);
            text += mutate_case(entry.name.substr(toks[0].begin, toks[0].end - toks[0].begin), rng);
        }
    }
    TextCase out;
    out.text = std::move(text);
    if (rng.bernoulli(0.6)) {
        out.epicenter = LatLon{rng.uniform(-60.0, 60.0), rng.uniform(-180.0, 180.0)};
    }
    return out;
}

std::string tag_repr(const PlaceTag& tag) {
    std::ostringstream out;
    out << tag.place_id << "[" << tag.begin << "," << tag.end << ")`" << tag.surface << "`"
        << to_string(tag.granularity);
    return out.str();
}

std::string diff_tags(const std::vector<PlaceTag>& got, const std::vector<PlaceTag>& want) {
    if (got.size() != want.size()) {
        return "tag count " + std::to_string(got.size()) + " vs " + std::to_string(want.size());
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
        const auto& a = got[i];
        const auto& b = want[i];
        if (a.surface != b.surface || a.begin != b.begin || a.end != b.end ||
            a.place_id != b.place_id || a.position.lat != b.position.lat ||
            a.position.lon != b.position.lon || a.granularity != b.granularity) {
            return "tag " + std::to_string(i) + ": " + tag_repr(a) + " vs " + tag_repr(b);
        }
    }
    return "";
}

// --- metric case generation ---

struct RefPlace {
    const char* place_id;
    double lat;
    double lon;
    Granularity granularity;
};

const std::vector<RefPlace>& ref_places() {
    // lat/lon chosen to land on and around cell boundaries, both hemispheres
    static const std::vector<RefPlace> places{
        {"pa", 10.0, 20.0, Granularity::city},      {"pb", 10.3, 20.6, Granularity::city},
        {"pc", -4.2, 152.1, Granularity::region},   {"pd", -4.7, 151.8, Granularity::city},
        {"pe", 37.5, -122.0, Granularity::building},{"pf", 37.76, -121.95, Granularity::city},
        {"pg", 28.0, 84.0, Granularity::country},   {"ph", 28.21, 84.38, Granularity::other},
        {"pi", 0.0, 0.0, Granularity::city},        {"pj", -0.1, 0.1, Granularity::region},
        {"pk", 32.5, -97.0, Granularity::city},     {"pl", 32.99, -96.51, Granularity::building}};
    return places;
}

std::vector<PlaceTag> random_tags(Rng& rng) {
    std::vector<PlaceTag> tags;
    const std::size_t count = rng.below(5);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& place = ref_places()[rng.below(ref_places().size())];
        PlaceTag tag;
        tag.surface = place.place_id;
        tag.begin = i * 8;
        tag.end = i * 8 + 2;
        tag.place_id = place.place_id;
        tag.position = LatLon{place.lat, place.lon};
        tag.granularity = place.granularity;
        tags.push_back(std::move(tag));
    }
    return tags;
}

DamageLabel random_damage(Rng& rng) {
    switch (rng.below(3)) {
        case 0: return DamageLabel::present;
        case 1: return DamageLabel::absent_reported;
        default: return DamageLabel::no_info;
    }
}

EventLog random_log(Rng& rng) {
    EventLog log;
    log.event.event_id = "chk";
    log.event.magnitude = 5.0;
    log.event.depth_km = 10.0;
    log.event.epicenter = LatLon{rng.uniform(-45.0, 45.0), rng.uniform(-90.0, 90.0)};
    log.event.origin_time_ms = 0;
    log.event.place_name = "Checkville";
    log.mode = CollabMode::simulation;

    const std::size_t n_collected = rng.below(41);
    for (std::size_t i = 0; i < n_collected; ++i) {
        RawMessage msg;
        msg.msg_id = "c" + std::to_string(i);
        msg.author_id = "a" + std::to_string(i % 7);
        msg.timestamp_ms = std::int64_t(i) * 1000;
        msg.text = "x";
        log.collected.push_back(std::move(msg));
    }
    for (const auto& msg : log.collected) {
        if (!rng.bernoulli(0.5)) continue;
        TaggedMessage tm;
        tm.message = msg;
        tm.damage = random_damage(rng);
        tm.tags = random_tags(rng);
        log.relevant.push_back(std::move(tm));
    }
    const std::size_t n_replies = rng.below(31);
    for (std::size_t j = 0; j < n_replies; ++j) {
        ReplyRecord reply;
        reply.tagged.message.msg_id = "r" + std::to_string(j);
        reply.tagged.message.author_id = "a" + std::to_string(j % 5);
        reply.tagged.message.timestamp_ms = std::int64_t(1'000'000 + j);
        reply.tagged.message.text = "y";
        reply.tagged.damage = random_damage(rng);
        reply.tagged.tags = random_tags(rng);
        reply.question_id = "q-u" + std::to_string(j);
        reply.kind = rng.bernoulli(0.5) ? QuestionKind::ask_damage : QuestionKind::ask_geo;
        reply.delta_t_min = rng.uniform(0.05, 90.0);
        reply.collaborative = rng.bernoulli(0.7);
        log.replies.push_back(std::move(reply));
    }
    return log;
}

// --- direct metric recomputation ---

using OptD = std::optional<double>;

template <typename Fn>
OptD produced(Fn&& fn) {
    try {
        return std::forward<Fn>(fn)();
    } catch (const MetricUndefined&) {
        return std::nullopt;
    }
}

std::vector<const TaggedMessage*> ref_filter(const EventLog& log, char which) {
    std::vector<const TaggedMessage*> out;
    if (which == 'r') {
        for (const auto& tm : log.relevant) out.push_back(&tm);
    } else {
        for (const auto& reply : log.replies) {
            if (which == 'a' && reply.kind != QuestionKind::ask_damage) continue;
            if (which == 'g' && reply.kind != QuestionKind::ask_geo) continue;
            out.push_back(&reply.tagged);
        }
    }
    return out;
}

OptD ref_damage_ratio(const std::vector<const TaggedMessage*>& set) {
    if (set.empty()) return std::nullopt;
    std::size_t hits = 0;
    for (const auto* tm : set)
        if (tm->damage == DamageLabel::present) ++hits;
    return double(hits) / double(set.size());
}

OptD ref_damage_info(const std::vector<const TaggedMessage*>& set) {
    if (set.empty()) return std::nullopt;
    std::size_t hits = 0;
    for (const auto* tm : set)
        if (tm->damage == DamageLabel::present || tm->damage == DamageLabel::absent_reported)
            ++hits;
    return double(hits) / double(set.size());
}

OptD ref_density(const std::vector<const TaggedMessage*>& set) {
    if (set.empty()) return std::nullopt;
    double tags = 0.0;
    for (const auto* tm : set) tags += double(tm->tags.size());
    return tags / double(set.size());
}

std::vector<std::string> ref_sorted_unique_places(const std::vector<const TaggedMessage*>& set) {
    std::vector<std::string> ids;
    for (const auto* tm : set)
        for (const auto& tag : tm->tags) ids.push_back(tag.place_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

OptD ref_variety(const std::vector<const TaggedMessage*>& set, VarietyMode mode) {
    if (set.empty()) return std::nullopt;
    if (mode == VarietyMode::event_level) {
        return double(ref_sorted_unique_places(set).size()) / double(set.size());
    }
    double total = 0.0;
    for (const auto* tm : set) {
        std::vector<std::string> ids;
        for (const auto& tag : tm->tags) ids.push_back(tag.place_id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        total += double(ids.size());
    }
    return total / double(set.size());
}

OptD ref_coverage(const std::vector<const TaggedMessage*>& reply2geo,
                  const std::vector<const TaggedMessage*>& relevant) {
    const auto known = ref_sorted_unique_places(relevant);
    if (known.empty()) return std::nullopt;
    const auto seen = ref_sorted_unique_places(reply2geo);
    std::size_t fresh = 0;
    for (const auto& id : seen) {
        if (!std::binary_search(known.begin(), known.end(), id)) ++fresh;
    }
    return double(fresh) / double(known.size());
}

std::optional<std::map<Granularity, double>> ref_granularity(
    const std::vector<const TaggedMessage*>& set) {
    double counts[5] = {0, 0, 0, 0, 0};
    double total = 0.0;
    for (const auto* tm : set) {
        for (const auto& tag : tm->tags) {
            counts[granularity_rank(tag.granularity)] += 1.0;
            total += 1.0;
        }
    }
    if (total == 0.0) return std::nullopt;
    std::map<Granularity, double> out;
    for (int level = 0; level < 5; ++level) {
        out[Granularity(level)] = counts[level] / total;
    }
    return out;
}

std::vector<CrisisCell> ref_crisis_map(const std::vector<const TaggedMessage*>& assessed,
                                       double cell_deg) {
    std::map<std::pair<std::int64_t, std::int64_t>, std::pair<std::size_t, std::size_t>> bins;
    for (const auto* tm : assessed) {
        if (tm->tags.empty()) continue;
        std::size_t finest = 0;
        for (std::size_t i = 1; i < tm->tags.size(); ++i) {
            if (granularity_rank(tm->tags[i].granularity) <
                granularity_rank(tm->tags[finest].granularity)) {
                finest = i;
            }
        }
        const auto& pos = tm->tags[finest].position;
        const auto key = std::make_pair(std::int64_t(std::floor(pos.lat / cell_deg)),
                                        std::int64_t(std::floor(pos.lon / cell_deg)));
        auto& bin = bins[key];
        bin.first += tm->damage == DamageLabel::present ? 1 : 0;
        bin.second += 1;
    }
    std::vector<CrisisCell> out;
    for (const auto& [key, bin] : bins) {
        if (bin.first == 0) continue;
        out.push_back(CrisisCell{key.first, key.second, bin.first, bin.second});
    }
    return out;
}

int ref_round_percent(double ratio) {
    const double scaled = ratio * 100.0;
    const double base = std::floor(scaled);
    const double frac = scaled - base;
    if (frac < 0.5) return int(base);
    if (frac > 0.5) return int(base) + 1;
    const long long b = (long long)base;
    return (b % 2 == 0) ? int(base) : int(base) + 1;
}

struct Recorder {
    OracleCheckResult* result;
    std::string prefix;

    void mismatch(const std::string& what) {
        ++result->mismatch_count;
        result->mismatches.push_back(prefix + what);
    }
    void check_value(const char* name, const OptD& got, const OptD& want) {
        if (!same_defined(got, want)) {
            mismatch(std::string(name) + ": " + show(got) + " vs reference " + show(want));
        }
    }
};

}  // namespace

OracleCheckResult oracle_check(const Gazetteer& gazetteer, const OracleCheckOptions& options) {
    OracleCheckResult result;
    const NaiveGeoparser naive(gazetteer, options.corrupt_tie_rule);
    const Geoparser parser(gazetteer);

    // names shared by more than one entry make tie resolution observable
    std::vector<std::size_t> ambiguous_pool;
    {
        std::map<std::string, std::size_t> name_counts;
        for (const auto& entry : gazetteer.entries()) {
            std::string lowered = entry.name;
            for (char& c : lowered) c = char(std::tolower(static_cast<unsigned char>(c)));
            ++name_counts[lowered];
        }
        for (std::size_t i = 0; i < gazetteer.entries().size(); ++i) {
            std::string lowered = gazetteer.entries()[i].name;
            for (char& c : lowered) c = char(std::tolower(static_cast<unsigned char>(c)));
            if (name_counts[lowered] > 1) ambiguous_pool.push_back(i);
        }
    }

    for (std::size_t i = 0; i < options.iterations; ++i) {
        const std::string stream_name = "oracle-geo-" + std::to_string(i);
        Rng rng(options.seed, stream_name);
        const TextCase tc = random_text_case(rng, gazetteer, ambiguous_pool);
        const auto got = parser.parse(tc.text, tc.epicenter);
        const auto want = naive.parse(tc.text, tc.epicenter);
        ++result.geoparse_cases;
        const std::string diff = diff_tags(got, want);
        if (!diff.empty()) {
            ++result.mismatch_count;
            if (result.mismatches.size() < options.max_reported) {
                std::string where = "geoparse case " + std::to_string(i) + " (stream " +
                                    stream_name + "): " + diff + "; text `" + tc.text + "`";
                if (tc.epicenter) {
                    where += " epicenter " + std::to_string(tc.epicenter->lat) + "," +
                             std::to_string(tc.epicenter->lon);
                }
                result.mismatches.push_back(std::move(where));
            }
        }
    }

    for (std::size_t i = 0; i < options.iterations; ++i) {
        const std::string stream_name = "oracle-metric-" + std::to_string(i);
        Rng rng(options.seed, stream_name);
        const EventLog log = random_log(rng);
        ++result.metric_cases;

        Recorder rec{&result, "metric case " + std::to_string(i) + " (stream " + stream_name +
                                  "): "};

        const auto rel = ref_filter(log, 'r');
        const auto r2d = ref_filter(log, 'a');
        const auto r2g = ref_filter(log, 'g');

        rec.check_value("message_gain", produced([&] { return message_gain(log); }),
                        log.relevant.empty()
                            ? OptD{}
                            : OptD{double(log.replies.size()) / double(log.relevant.size())});
        OptD ref_collab;
        if (!log.replies.empty()) {
            double hits = 0.0;
            for (const auto& reply : log.replies) hits += reply.collaborative ? 1.0 : 0.0;
            ref_collab = hits / double(log.replies.size());
        }
        rec.check_value("collaborative_rate", produced([&] { return collaborative_rate(log); }),
                        ref_collab);
        OptD ref_latency;
        if (!log.replies.empty()) {
            double total = 0.0;
            for (const auto& reply : log.replies) total += reply.delta_t_min;
            ref_latency = total / double(log.replies.size());
        }
        rec.check_value("mean_reply_latency", produced([&] { return mean_reply_latency(log); }),
                        ref_latency);

        const MessageSet rel_set = relevant_set(log);
        const MessageSet r2d_set = reply_set(log, QuestionKind::ask_damage);
        const MessageSet r2g_set = reply_set(log, QuestionKind::ask_geo);

        rec.check_value("damage_ratio(relevant)", produced([&] { return damage_ratio(rel_set); }),
                        ref_damage_ratio(rel));
        rec.check_value("damage_ratio(reply2damage)",
                        produced([&] { return damage_ratio(r2d_set); }), ref_damage_ratio(r2d));
        rec.check_value("damage_info_ratio", produced([&] { return damage_info_ratio(r2d_set); }),
                        ref_damage_info(r2d));
        rec.check_value("place_density(relevant)",
                        produced([&] { return place_density(rel_set); }), ref_density(rel));
        rec.check_value("place_density(reply2geo)",
                        produced([&] { return place_density(r2g_set); }), ref_density(r2g));
        for (const VarietyMode mode : {VarietyMode::per_message, VarietyMode::event_level}) {
            const std::string label = to_string(mode);
            rec.check_value(("variety(relevant," + label + ")").c_str(),
                            produced([&] { return place_variety(rel_set, mode); }),
                            ref_variety(rel, mode));
            rec.check_value(("variety(reply2geo," + label + ")").c_str(),
                            produced([&] { return place_variety(r2g_set, mode); }),
                            ref_variety(r2g, mode));
        }
        rec.check_value("coverage_gain",
                        produced([&] { return coverage_gain(r2g_set, rel_set); }),
                        ref_coverage(r2g, rel));

        std::optional<std::map<Granularity, double>> got_gran;
        try {
            got_gran = granularity_distribution(rel_set);
        } catch (const MetricUndefined&) {
        }
        const auto want_gran = ref_granularity(rel);
        if (got_gran.has_value() != want_gran.has_value()) {
            rec.mismatch("granularity_distribution definedness differs");
        } else if (got_gran) {
            for (const auto& [g, frac] : *want_gran) {
                if (!close(got_gran->at(g), frac)) {
                    rec.mismatch("granularity_distribution[" + to_string(g) + "]: " +
                                 show(got_gran->at(g)) + " vs reference " + show(frac));
                }
            }
        }

        static const double cell_sizes[] = {0.1, 0.25, 0.5, 1.0};
        const double cell_deg = cell_sizes[i % 4];
        const MessageSet assessed = assessed_set(log);
        std::vector<const TaggedMessage*> ref_assessed = rel;
        for (const auto& reply : log.replies) ref_assessed.push_back(&reply.tagged);
        const auto got_cells = crisis_map(assessed, cell_deg);
        const auto want_cells = ref_crisis_map(ref_assessed, cell_deg);
        if (got_cells != want_cells) {
            rec.mismatch("crisis_map differs (" + std::to_string(got_cells.size()) + " vs " +
                         std::to_string(want_cells.size()) + " cells at " +
                         std::to_string(cell_deg) + " deg)");
        }

        for (int k = 0; k < 8; ++k) {
            double ratio = rng.uniform(-0.2, 1.8);
            if (k % 2 == 0) ratio = double(rng.range(-40, 360)) / 2.0 / 100.0;  // exact halves
            if (round_percent(ratio) != ref_round_percent(ratio)) {
                rec.mismatch("round_percent(" + std::to_string(ratio) + "): " +
                             std::to_string(round_percent(ratio)) + " vs reference " +
                             std::to_string(ref_round_percent(ratio)));
            }
        }

        // cap stored messages but keep counting via mismatch_count
        if (result.mismatches.size() > options.max_reported) {
            result.mismatches.resize(options.max_reported);
        }
    }
    return result;
}

}  // namespace quakesense
