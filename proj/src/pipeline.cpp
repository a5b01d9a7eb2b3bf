#include "quakesense/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "quakesense/classify.hpp"
#include "quakesense/errors.hpp"
#include "quakesense/ingest.hpp"
#include "quakesense/witness.hpp"

namespace quakesense {
namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write file: " + path);
    }
    out << content;
}

struct LoadedModels {
    ClassifierModel relevance;
    ClassifierModel damage_presence;
    ClassifierModel damage_info;
    WitnessScorer scorer;
    FeatureVector centroid;
};

LoadedModels load_models(const ModelPaths& paths) {
    LoadedModels m;
    m.relevance = ClassifierModel::load(paths.relevance);
    m.damage_presence = ClassifierModel::load(paths.damage_presence);
    m.damage_info = ClassifierModel::load(paths.damage_info);
    if (paths.relevance_threshold) m.relevance.threshold = *paths.relevance_threshold;
    if (paths.damage_presence_threshold) m.damage_presence.threshold = *paths.damage_presence_threshold;
    if (paths.damage_info_threshold) m.damage_info.threshold = *paths.damage_info_threshold;
    m.scorer = WitnessScorer::load(paths.witness_scorer);
    m.centroid = feature_vector_from_json(slurp(paths.witness_centroid));
    return m;
}

TaggedMessage analyze_message(const RawMessage& msg, const LoadedModels& models,
                              const Geoparser& geoparser, const LatLon& epicenter) {
    TaggedMessage out;
    out.message = msg;
    out.damage = classify_damage(models.damage_presence, models.damage_info, msg.text);
    out.tags = geoparser.parse(msg.text, epicenter);
    return out;
}

}  // namespace

PipelineResult run_scenario(const ScenarioConfig& config) {
    Gazetteer gazetteer = Gazetteer::load(config.gazetteer_path);
    Geoparser geoparser(gazetteer);
    LoadedModels models = load_models(config.models);

    World world(scenario_world_config(config), config.event, &gazetteer, config.seed);
    const std::vector<RawMessage>& stream = world.simulate_stream();

    CollectionFilter filter = scenario_filter(config);
    CollectResult collected = collect(stream, filter, config.event, config.crawl);

    std::vector<RawMessage> relevant_msgs = filter_relevant(models.relevance, collected.collected);

    WitnessFeatureExtractor extractor(&geoparser, models.centroid);
    std::vector<ScoredMessage> scored;
    scored.reserve(relevant_msgs.size());
    for (const RawMessage& msg : relevant_msgs) {
        scored.push_back(score_message(extractor, models.scorer, msg));
    }
    std::vector<ContactTarget> targets = select_candidates(scored, config.contact_budget, {});

    std::vector<Bot> bots;
    bots.reserve(static_cast<std::size_t>(config.bots.count));
    for (int i = 0; i < config.bots.count; ++i) {
        Bot bot;
        bot.bot_id = "bot-" + std::to_string(i + 1);
        bot.limit.max_sends = config.bots.max_sends;
        bot.limit.window_ms = static_cast<std::int64_t>(std::llround(config.bots.window_s * 1000.0));
        bots.push_back(std::move(bot));
    }
    // Dispatch starts once the collection window closes.
    std::int64_t dispatch_start = config.event.origin_time_ms + world.config().time_window_ms;
    std::vector<PlannedSend> plan = schedule(targets, std::move(bots), dispatch_start);

    PipelineResult result;
    SendOptions send_opts;
    send_opts.staleness_deadline_ms =
        dispatch_start + static_cast<std::int64_t>(std::llround(config.bots.staleness_s * 1000.0));
    SendOutcome outcome = send(plan, world, result.ledger, send_opts);

    ReplyCollection replies =
        collect_replies(world, std::numeric_limits<std::int64_t>::max(), outcome.sent);

    EventLog log;
    log.event = config.event;
    log.mode = config.collab_mode;
    log.collected = std::move(collected.collected);
    log.relevant.reserve(relevant_msgs.size());
    for (const RawMessage& msg : relevant_msgs) {
        log.relevant.push_back(analyze_message(msg, models, geoparser, config.event.epicenter));
    }
    log.replies.reserve(replies.replies.size());
    for (const Reply& reply : replies.replies) {
        ReplyRecord rec;
        rec.tagged = analyze_message(reply.message, models, geoparser, config.event.epicenter);
        rec.question_id = reply.question_id;
        rec.kind = reply.kind;
        rec.delta_t_min = reply.delta_t_min;
        if (config.collab_mode == CollabMode::simulation) {
            rec.collaborative = reply.collaborative;
        } else {
            // evaluation mode judges the reply by what the analyzers extract
            rec.collaborative = rec.kind == QuestionKind::ask_damage
                                    ? rec.tagged.damage != DamageLabel::no_info
                                    : !rec.tagged.tags.empty();
        }
        log.replies.push_back(std::move(rec));
    }
    log.dispatch = outcome.log;
    log.counters.dropped_by_crawl = collected.dropped_by_crawl;
    for (const DispatchLogEntry& entry : outcome.log) {
        if (entry.status == "sent") {
            ++log.counters.questions_sent;
        } else if (entry.status == "expired") {
            ++log.counters.expired_targets;
        } else if (entry.status == "duplicate-contact-suppressed") {
            ++log.counters.duplicate_suppressed;
        }
    }
    log.counters.late_replies = replies.late_count;
    log.counters.orphan_replies = replies.orphan_count;
    log.validate();

    result.report = build_report(log, config.variety_mode);
    result.cells = crisis_map(assessed_set(log), config.grid_cell_deg);
    result.platform_log = world.message_log();
    result.grid_cell_deg = config.grid_cell_deg;
    result.log = std::move(log);
    return result;
}

void write_run_artifacts(const std::string& out_dir, const PipelineResult& result) {
    std::filesystem::create_directories(out_dir);
    auto at = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };
    save_message_log(at("message_log.jsonl"), result.platform_log);
    save_dispatch_log(at("dispatch_log.jsonl"), result.log.dispatch);
    save_event_log(out_dir, result.log);
    spit(at("report.json"), result.report.to_json());
    spit(at("report.csv"), report_csv(result.report));
    spit(at("crisis_map.geojson"), crisis_map_geojson(result.cells, result.grid_cell_deg));
    result.ledger.save(at("contact_ledger.tsv"));
}

PipelineResult run_scenario_to(const ScenarioConfig& config, const std::string& out_dir) {
    PipelineResult result = run_scenario(config);
    write_run_artifacts(out_dir, result);
    return result;
}

MetricsReport report_from_dir(const std::string& dir, VarietyMode variety_mode) {
    EventLog log = load_event_log(dir);
    return build_report(log, variety_mode);
}

}  // namespace quakesense
