#include "quakesense/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "quakesense/dispatch.hpp"
#include "quakesense/errors.hpp"

namespace quakesense {

namespace {

void require_prob(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(std::string(name) + " must be in [0,1]");
    }
}

// Keeps non-witness placement below a half circumference so the spherical
// offset never wraps back inside the felt radius.
constexpr double kMaxPlacementKm = 19000.0;

}  // namespace

void validate_world_config(const WorldConfig& c) {
    require_prob(c.p_post, "p_post");
    require_prob(c.p_geotag, "p_geotag");
    require_prob(c.p_reply, "p_reply");
    require_prob(c.p_collaborative, "p_collaborative");
    require_prob(c.noise, "noise");
    require_prob(c.mix.witness, "mix.witness");
    require_prob(c.mix.sympathizer, "mix.sympathizer");
    require_prob(c.mix.keyword_noise, "mix.keyword_noise");
    if (c.mix.witness + c.mix.sympathizer + c.mix.keyword_noise > 1.0 + 1e-12) {
        throw ConfigError("archetype mix fractions sum past 1");
    }
    if (!(c.felt_r0 > 0.0)) throw ConfigError("felt_r0 must be positive");
    if (!(c.felt_c > 0.0)) throw ConfigError("felt_c must be positive");
    if (!std::isfinite(c.latency_mu_log)) throw ConfigError("latency_mu_log must be finite");
    if (!(c.latency_sigma_log > 0.0)) throw ConfigError("latency_sigma_log must be positive");
    if (c.time_window_ms <= 0) throw ConfigError("time_window_ms must be positive");
    if (!(c.enrichment.place_density_factor > 0.0)) {
        throw ConfigError("enrichment.place_density_factor must be positive");
    }
    if (!(c.enrichment.building_boost > 0.0)) {
        throw ConfigError("enrichment.building_boost must be positive");
    }
    require_prob(c.enrichment.damage_present_frac, "enrichment.damage_present_frac");
}

double felt_radius(double magnitude, double r0, double c) {
    if (!(r0 > 0.0)) throw ConfigError("felt-radius r0 must be positive");
    if (!(c > 0.0)) throw ConfigError("felt-radius c must be positive");
    return r0 * std::pow(10.0, c * magnitude);
}

std::vector<UserProfile> generate_population(const WorldConfig& config,
                                             const EarthquakeEvent& event, std::uint64_t seed) {
    validate_world_config(config);
    const double radius = felt_radius(event.magnitude, config.felt_r0, config.felt_c);
    const Rng pop_rng = Rng(seed).stream("population");

    std::vector<UserProfile> out;
    out.reserve(config.population);
    char buf[16];
    for (std::size_t i = 0; i < config.population; ++i) {
        std::snprintf(buf, sizeof buf, "u%07zu", i + 1);
        UserProfile p;
        p.user_id = buf;
        Rng r = pop_rng.stream(p.user_id);

        const double pick = r.uniform01();
        const auto& mix = config.mix;
        if (pick < mix.witness) {
            p.archetype = Archetype::witness;
        } else if (pick < mix.witness + mix.sympathizer) {
            p.archetype = Archetype::sympathizer;
        } else if (pick < mix.witness + mix.sympathizer + mix.keyword_noise) {
            p.archetype = Archetype::keyword_noise;
        } else {
            p.archetype = Archetype::chatter;
        }
        p.is_witness = p.archetype == Archetype::witness;

        const double bearing = r.uniform01() * 2.0 * M_PI;
        double dist;
        if (p.is_witness) {
            // uniform over the inner 95% of the felt disc
            dist = radius * (0.05 + 0.90 * std::sqrt(r.uniform01()));
        } else {
            dist = std::min(radius * (1.15 + 4.85 * r.uniform01()), kMaxPlacementKm);
        }
        const LatLon home = offset_km(event.epicenter, dist, bearing);
        p.home_lat = home.lat;
        p.home_lon = home.lon;
        p.geotag_enabled = r.bernoulli(config.p_geotag);
        p.collaboration_prob = config.p_collaborative;
        p.reply_prob = config.p_reply;
        out.push_back(std::move(p));
    }
    return out;
}

World::World(const WorldConfig& config, const EarthquakeEvent& event, const Gazetteer* gazetteer,
             std::uint64_t seed)
    : config_(config), event_(event), gazetteer_(gazetteer), root_(seed) {
    validate_world_config(config_);
    validate_event(event_, "world event");
    if (gazetteer_ == nullptr || gazetteer_->entries().empty()) {
        throw UsageError("world needs a non-empty gazetteer");
    }
    radius_km_ = felt_radius(event_.magnitude, config_.felt_r0, config_.felt_c);
    profiles_ = generate_population(config_, event_, seed);
    profile_index_.reserve(profiles_.size());
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
        profile_index_.emplace(profiles_[i].user_id, i);
    }

    const auto& entries = gazetteer_->entries();
    const double near_limit = std::max(2.0 * radius_km_, 120.0);
    std::vector<std::size_t> near;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (haversine_km(entries[i].position, event_.epicenter) <= near_limit) near.push_back(i);
    }
    if (near.empty()) {
        near.resize(entries.size());
        std::iota(near.begin(), near.end(), std::size_t{0});
    }

    std::vector<std::int64_t> city_pops;
    for (std::size_t idx : near) {
        if (entries[idx].granularity == Granularity::city) {
            city_pops.push_back(entries[idx].population);
        }
    }
    std::int64_t city_median = 0;
    if (!city_pops.empty()) {
        std::sort(city_pops.begin(), city_pops.end());
        city_median = city_pops[city_pops.size() / 2];
    }

    const auto spont_gran = [](Granularity g) {
        switch (g) {
            case Granularity::building: return 0.04;
            case Granularity::city: return 1.0;
            case Granularity::region: return 0.50;
            case Granularity::country: return 0.35;
            case Granularity::other: return 0.12;
        }
        return 0.12;
    };
    const double boost = config_.enrichment.building_boost;
    const auto reply_gran = [boost](Granularity g) {
        switch (g) {
            case Granularity::building: return 0.04 * boost;
            case Granularity::city: return 1.0;
            case Granularity::region: return 0.30;
            case Granularity::country: return 0.15;
            case Granularity::other: return 0.12;
        }
        return 0.12;
    };

    for (std::size_t idx : near) {
        const auto& e = entries[idx];
        const double base = std::log10(10.0 + double(std::max<std::int64_t>(e.population, 0)));
        reply_pool_.push_back(idx);
        reply_weights_.push_back(reply_gran(e.granularity) * base);
        // the spontaneous pool skips unremarkable cities; solicited replies
        // can therefore surface places the spontaneous stream never names
        if (e.granularity == Granularity::city && e.population < city_median) continue;
        spontaneous_pool_.push_back(idx);
        spontaneous_weights_.push_back(spont_gran(e.granularity) * base);
    }
    if (spontaneous_pool_.empty()) {
        spontaneous_pool_ = reply_pool_;
        spontaneous_weights_ = reply_weights_;
    }

    const auto& bank = TemplateBank::builtin();
    const double ww = config_.mix.witness, ws = config_.mix.sympathizer;
    if (ww + ws > 0.0) {
        spontaneous_slot_mean_ = (ww * bank.mean_slots(Archetype::witness) +
                                  ws * bank.mean_slots(Archetype::sympathizer)) /
                                 (ww + ws);
    }
    for (int g = 0; g < 4; ++g) {
        for (const auto& t : bank.group(static_cast<Archetype>(g))) {
            group_weights_[g].push_back(t.weight);
        }
    }
}

const UserProfile* World::find_profile(const std::string& user_id) const {
    const auto it = profile_index_.find(user_id);
    return it == profile_index_.end() ? nullptr : &profiles_[it->second];
}

World::PlacePick World::pick_places(const std::vector<std::size_t>& pool,
                                    const std::vector<double>& weights, int count,
                                    Rng& rng) const {
    PlacePick out;
    const auto& entries = gazetteer_->entries();
    for (int k = 0; k < count; ++k) {
        std::size_t idx = pool[rng.weighted(weights)];
        for (int attempt = 0; attempt < 16; ++attempt) {
            const auto& id = entries[idx].place_id;
            if (std::find(out.ids.begin(), out.ids.end(), id) == out.ids.end()) break;
            idx = pool[rng.weighted(weights)];
        }
        out.names.push_back(entries[idx].name);
        out.ids.push_back(entries[idx].place_id);
    }
    return out;
}

std::optional<LatLon> World::jitter_geotag(const UserProfile& profile, Rng& rng) const {
    if (!profile.geotag_enabled) return std::nullopt;
    const double bearing = rng.uniform01() * 2.0 * M_PI;
    const double dist = 2.0 * rng.uniform01();
    return offset_km({profile.home_lat, profile.home_lon}, dist, bearing);
}

const std::vector<RawMessage>& World::simulate_stream() {
    if (streamed_) throw UsageError("simulate_stream may run only once per world");
    streamed_ = true;

    const auto& bank = TemplateBank::builtin();
    const Rng posting = root_.stream("posting");
    for (const auto& profile : profiles_) {
        Rng r = posting.stream(profile.user_id);
        if (!r.bernoulli(config_.p_post)) continue;

        RawMessage m;
        m.author_id = profile.user_id;
        // quadratic bias toward the minutes right after the event
        const double u = r.uniform01();
        m.timestamp_ms =
            event_.origin_time_ms + std::int64_t(double(config_.time_window_ms) * u * u);
        if (m.timestamp_ms >= event_.origin_time_ms + config_.time_window_ms) {
            m.timestamp_ms = event_.origin_time_ms + config_.time_window_ms - 1;
        }

        const auto& group = bank.group(profile.archetype);
        const auto& tpl = group[r.weighted(group_weights_[int(profile.archetype)])];
        PlacePick pick =
            pick_places(spontaneous_pool_, spontaneous_weights_, slot_count(tpl.text), r);
        m.text = render_template(tpl.text, pick.names, config_.noise, r);
        m.geotag = jitter_geotag(profile, r);
        m.truth.relevant = tpl.relevant;
        m.truth.witness = profile.is_witness;
        m.truth.damage = tpl.damage;
        m.truth.mentioned_place_ids = std::move(pick.ids);
        spontaneous_.push_back(std::move(m));
    }

    std::stable_sort(spontaneous_.begin(), spontaneous_.end(),
                     [](const RawMessage& a, const RawMessage& b) {
                         return a.timestamp_ms < b.timestamp_ms;
                     });
    char buf[16];
    for (std::size_t i = 0; i < spontaneous_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "m%07zu", i + 1);
        spontaneous_[i].msg_id = buf;
    }
    return spontaneous_;
}

std::optional<ScheduledReply> World::deliver_question(const Question& question) {
    const UserProfile* profile = find_profile(question.target_user);
    if (profile == nullptr) {
        throw DeliveryError("unknown target user `" + question.target_user + "`");
    }

    RawMessage qmsg;
    qmsg.msg_id = question.question_id;
    qmsg.author_id = question.bot_id;
    qmsg.timestamp_ms = question.sent_time;
    qmsg.text = question.text;
    questions_.push_back(std::move(qmsg));

    // Per-target stream: reply behavior is independent of send order.
    Rng r = root_.stream("replies").stream(question.target_user);
    if (!r.bernoulli(profile->reply_prob)) return std::nullopt;

    const double delta_min = r.lognormal(config_.latency_mu_log, config_.latency_sigma_log);
    const bool collaborative = r.bernoulli(profile->collaboration_prob);

    const auto& bank = TemplateBank::builtin();
    auto choose = [&r](const std::vector<ReplyTemplate>& v) -> const ReplyTemplate& {
        std::vector<double> w;
        w.reserve(v.size());
        for (const auto& t : v) w.push_back(t.weight);
        return v[r.weighted(w)];
    };

    const ReplyTemplate* tpl = nullptr;
    PlacePick pick;
    if (question.kind == QuestionKind::ask_geo) {
        if (collaborative) {
            const double target = std::clamp(
                config_.enrichment.place_density_factor * spontaneous_slot_mean_, 1.0, 4.0);
            // floor/ceil mixture: slot count meets the configured density
            // exactly in expectation, which a truncated draw would undershoot
            const int lo = static_cast<int>(target);
            const int slots = std::min(4, lo + (r.uniform01() < target - double(lo) ? 1 : 0));
            tpl = &choose(bank.geo_collab(slots));
            pick = pick_places(reply_pool_, reply_weights_, slots, r);
        } else {
            tpl = &choose(bank.geo_noncollab());
        }
    } else {
        if (collaborative) {
            const bool present = r.bernoulli(config_.enrichment.damage_present_frac);
            tpl = &choose(present ? bank.damage_collab_present() : bank.damage_collab_absent());
            pick = pick_places(reply_pool_, reply_weights_, slot_count(tpl->text), r);
        } else {
            tpl = &choose(bank.damage_noncollab());
        }
    }

    ScheduledReply reply;
    reply.question_id = question.question_id;
    reply.kind = question.kind;
    reply.delta_t_min = delta_min;
    RawMessage& m = reply.message;
    char buf[16];
    std::snprintf(buf, sizeof buf, "r%06llu", static_cast<unsigned long long>(++reply_counter_));
    m.msg_id = buf;
    m.author_id = question.target_user;
    m.timestamp_ms =
        question.sent_time + std::max<std::int64_t>(1, std::llround(delta_min * 60'000.0));
    m.text = render_template(tpl->text, pick.names, config_.noise, r);
    m.in_reply_to = question.question_id;
    m.geotag = jitter_geotag(*profile, r);
    m.truth.relevant = collaborative;
    m.truth.witness = profile->is_witness;
    m.truth.damage = tpl->damage;
    m.truth.mentioned_place_ids = std::move(pick.ids);
    m.truth.collaborative = collaborative;

    reply_messages_.push_back(m);
    pending_.push_back(reply);
    return reply;
}

std::vector<ScheduledReply> World::collect_pending(std::int64_t horizon_ms) {
    std::vector<ScheduledReply> ready, late;
    for (auto& reply : pending_) {
        (reply.message.timestamp_ms <= horizon_ms ? ready : late).push_back(std::move(reply));
    }
    pending_ = std::move(late);
    // pending_ was in schedule order, so stable sort realizes (ts, seq)
    std::stable_sort(ready.begin(), ready.end(), [](const ScheduledReply& a, const ScheduledReply& b) {
        return a.message.timestamp_ms < b.message.timestamp_ms;
    });
    return ready;
}

std::vector<RawMessage> World::message_log() const {
    std::vector<RawMessage> all;
    all.reserve(spontaneous_.size() + questions_.size() + reply_messages_.size());
    all.insert(all.end(), spontaneous_.begin(), spontaneous_.end());
    all.insert(all.end(), questions_.begin(), questions_.end());
    all.insert(all.end(), reply_messages_.begin(), reply_messages_.end());
    std::sort(all.begin(), all.end(), [](const RawMessage& a, const RawMessage& b) {
        if (a.timestamp_ms != b.timestamp_ms) return a.timestamp_ms < b.timestamp_ms;
        return a.msg_id < b.msg_id;
    });
    return all;
}

}  // namespace quakesense
