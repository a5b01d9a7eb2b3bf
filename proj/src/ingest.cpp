#include "quakesense/ingest.hpp"

#include <cctype>
#include <deque>
#include <unordered_set>

#include "quakesense/errors.hpp"
#include "quakesense/geo.hpp"

namespace quakesense {

const std::vector<std::string>& default_keywords() {
    static const std::vector<std::string> keywords{"earthquake", "quake", "tremor", "seism"};
    return keywords;
}

void validate_filter(const CollectionFilter& filter) {
    if (filter.keywords.empty() && !filter.match_geotagged_in_radius) {
        throw ConfigError("collection filter enables no criterion");
    }
    for (const auto& keyword : filter.keywords) {
        if (keyword.empty()) throw ConfigError("collection keyword is empty");
        for (const char c : keyword) {
            if (std::isupper(static_cast<unsigned char>(c))) {
                throw ConfigError("collection keyword `" + keyword + "` must be lowercase");
            }
        }
    }
    if (filter.match_geotagged_in_radius && !(filter.radius_km > 0.0)) {
        throw ConfigError("geotag match radius must be positive");
    }
}

namespace {

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool contains_word(const std::string& haystack, const std::string& needle) {
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !word_char(haystack[pos - 1]);
        const std::size_t end = pos + needle.size();
        const bool right_ok = end == haystack.size() || !word_char(haystack[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

}  // namespace

bool match(const RawMessage& message, const CollectionFilter& filter,
           const EarthquakeEvent& event) {
    validate_filter(filter);
    if (!filter.keywords.empty()) {
        std::string lowered = message.text;
        for (char& c : lowered) c = char(std::tolower(static_cast<unsigned char>(c)));
        for (const auto& keyword : filter.keywords) {
            if (contains_word(lowered, keyword)) return true;
        }
    }
    if (filter.match_geotagged_in_radius && message.geotag) {
        if (haversine_km(*message.geotag, event.epicenter) <= filter.radius_km) return true;
    }
    return false;
}

CollectResult collect(const std::vector<RawMessage>& stream, const CollectionFilter& filter,
                      const EarthquakeEvent& event, const CrawlLimit& limit) {
    validate_filter(filter);
    if (limit.window_ms <= 0) throw ConfigError("crawl window must be positive");

    CollectResult result;
    std::unordered_set<std::string> seen;
    std::deque<std::int64_t> window;  // timestamps of kept messages, oldest first
    std::int64_t prev_ts = INT64_MIN;
    for (const auto& msg : stream) {
        if (msg.timestamp_ms < prev_ts) {
            throw ValidationError("stream is not timestamp-ordered at message " + msg.msg_id);
        }
        prev_ts = msg.timestamp_ms;
        if (!match(msg, filter, event)) continue;
        if (!seen.insert(msg.msg_id).second) {
            ++result.duplicates_skipped;
            continue;
        }
        if (limit.max_messages > 0) {
            while (!window.empty() && window.front() + limit.window_ms <= msg.timestamp_ms) {
                window.pop_front();
            }
            if (window.size() >= limit.max_messages) {
                ++result.dropped_by_crawl;
                continue;
            }
            window.push_back(msg.timestamp_ms);
        }
        result.collected.push_back(msg);
    }
    return result;
}

}  // namespace quakesense
