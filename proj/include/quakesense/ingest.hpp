#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quakesense/feed.hpp"
#include "quakesense/types.hpp"

namespace quakesense {

// Crawl selection criteria. At least one of the two criteria must be enabled.
struct CollectionFilter {
    std::vector<std::string> keywords;  // lowercase, matched on word boundaries
    bool match_geotagged_in_radius = false;
    double radius_km = 0.0;
};

// Default tracking keywords when a scenario does not override them.
const std::vector<std::string>& default_keywords();

// Throws ConfigError: empty or non-lowercase keywords, no criterion enabled,
// non-positive radius while the geotag criterion is on.
void validate_filter(const CollectionFilter& filter);

// Rate cap for the collector: at most max_messages kept inside any window of
// window_ms. max_messages == 0 disables the cap.
struct CrawlLimit {
    std::size_t max_messages = 0;
    std::int64_t window_ms = 60'000;
};

bool match(const RawMessage& message, const CollectionFilter& filter,
           const EarthquakeEvent& event);

struct CollectResult {
    std::vector<RawMessage> collected;
    std::size_t dropped_by_crawl = 0;
    std::size_t duplicates_skipped = 0;
};

// Walks the timestamp-ordered stream, keeps matching messages up to the crawl
// quota (excess is dropped newest-first and counted), and skips repeated
// msg_ids. Throws ValidationError when the stream is out of order.
CollectResult collect(const std::vector<RawMessage>& stream, const CollectionFilter& filter,
                      const EarthquakeEvent& event, const CrawlLimit& limit);

}  // namespace quakesense
