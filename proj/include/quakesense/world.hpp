#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "quakesense/feed.hpp"
#include "quakesense/geo.hpp"
#include "quakesense/geoparse.hpp"
#include "quakesense/rng.hpp"
#include "quakesense/templates.hpp"
#include "quakesense/types.hpp"

namespace quakesense {

struct Question;  // defined by the dispatch layer

// Population fractions per archetype; the remainder is plain chatter.
struct ArchetypeMix {
    double witness = 0.10;
    double sympathizer = 0.20;
    double keyword_noise = 0.40;
};

struct ReplyEnrichment {
    // Target place density of collaborative geo replies, as a multiple of the
    // spontaneous relevant-template density.
    double place_density_factor = 3.0;
    // Skews the reply place pool toward building-level entries.
    double building_boost = 4.0;
    // Fraction of collaborative damage replies that report damage present.
    double damage_present_frac = 0.45;
};

struct WorldConfig {
    std::size_t population = 0;
    double p_post = 0.30;
    double p_geotag = 0.02;
    double p_reply = 0.80;
    double p_collaborative = 0.90;
    double latency_mu_log = 1.48;  // log of minutes
    double latency_sigma_log = 0.50;
    double felt_r0 = 0.5;
    double felt_c = 0.45;
    ArchetypeMix mix;
    double noise = 0.15;  // token-garbling probability at render time
    std::int64_t time_window_ms = 3'600'000;
    ReplyEnrichment enrichment;
};

// Throws ConfigError when any field is out of range.
void validate_world_config(const WorldConfig& config);

struct UserProfile {
    std::string user_id;
    double home_lat = 0.0;
    double home_lon = 0.0;
    bool is_witness = false;
    bool geotag_enabled = false;
    double collaboration_prob = 0.0;
    double reply_prob = 0.0;
    Archetype archetype = Archetype::chatter;

    bool operator==(const UserProfile&) const = default;
};

// r = r0 * 10^(c * magnitude), in km. Throws ConfigError on non-positive
// params.
double felt_radius(double magnitude, double r0 = 0.5, double c = 0.45);

// Deterministic in (config, event, seed). Witnesses live inside the felt
// radius, everyone else strictly outside it.
std::vector<UserProfile> generate_population(const WorldConfig& config,
                                             const EarthquakeEvent& event, std::uint64_t seed);

struct ScheduledReply {
    RawMessage message;
    std::string question_id;
    QuestionKind kind;
    double delta_t_min = 0.0;
};

// One earthquake's worth of simulated OSN: a population, their spontaneous
// posts, and reply behavior for targeted questions. All randomness flows from
// the seed through named substreams (population / posting / replies), so
// posting outcomes do not shift when dispatch logic changes.
class World {
public:
    // The gazetteer backs the place pools used to fill text slots; it must
    // contain at least one entry.
    World(const WorldConfig& config, const EarthquakeEvent& event, const Gazetteer* gazetteer,
          std::uint64_t seed);

    const WorldConfig& config() const { return config_; }
    const EarthquakeEvent& event() const { return event_; }
    double felt_radius_km() const { return radius_km_; }
    const std::vector<UserProfile>& profiles() const { return profiles_; }
    const UserProfile* find_profile(const std::string& user_id) const;

    // Renders every spontaneous post in the collection window, ordered by
    // (timestamp, emission sequence). Callable once per world.
    const std::vector<RawMessage>& simulate_stream();

    // Delivers one targeted question to its user. The question itself is
    // recorded as a message; with probability reply_prob a reply is scheduled
    // and returned. Throws DeliveryError for an unknown target.
    std::optional<ScheduledReply> deliver_question(const Question& question);

    // Removes and returns scheduled replies with timestamp <= horizon,
    // ordered by (timestamp, schedule sequence). Later replies stay pending.
    std::vector<ScheduledReply> collect_pending(std::int64_t horizon_ms);
    std::size_t pending_count() const { return pending_.size(); }

    // Everything posted in this world so far (spontaneous posts, questions,
    // replies whether collected or still pending), ordered by (ts, msg_id).
    std::vector<RawMessage> message_log() const;

private:
    struct PlacePick {
        std::vector<std::string> names;
        std::vector<std::string> ids;
    };

    PlacePick pick_places(const std::vector<std::size_t>& pool,
                          const std::vector<double>& weights, int count, Rng& rng) const;
    std::optional<LatLon> jitter_geotag(const UserProfile& profile, Rng& rng) const;

    WorldConfig config_;
    EarthquakeEvent event_;
    const Gazetteer* gazetteer_;
    double radius_km_ = 0.0;
    Rng root_;
    std::vector<UserProfile> profiles_;
    std::unordered_map<std::string, std::size_t> profile_index_;

    // parallel index/weight arrays into gazetteer->entries()
    std::vector<std::size_t> spontaneous_pool_, reply_pool_;
    std::vector<double> spontaneous_weights_, reply_weights_;
    double spontaneous_slot_mean_ = 1.0;

    std::vector<double> group_weights_[4];

    bool streamed_ = false;
    std::vector<RawMessage> spontaneous_;
    std::vector<RawMessage> questions_;
    std::vector<RawMessage> reply_messages_;  // every scheduled reply's message
    std::vector<ScheduledReply> pending_;     // kept in schedule order
    std::uint64_t reply_counter_ = 0;
};

}  // namespace quakesense
