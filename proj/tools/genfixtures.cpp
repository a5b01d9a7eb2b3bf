// Regenerates everything under data/: gazetteer, labeled corpora, trained
// models, scenario configs and the sample feed. Deterministic; running it
// twice produces byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quakesense/classify.hpp"
#include "quakesense/errors.hpp"
#include "quakesense/fixtures.hpp"
#include "quakesense/scenario.hpp"
#include "quakesense/witness.hpp"
#include "quakesense/world.hpp"

namespace {

using namespace quakesense;

void spit(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
    std::printf("wrote %s\n", path.string().c_str());
}

// Mean feature vector of the positive examples; the witness scorer measures
// how close a message sits to typical relevant text.
FeatureVector corpus_centroid(const std::vector<LabeledExample>& corpus) {
    std::map<std::uint32_t, double> sums;
    std::size_t positives = 0;
    for (const LabeledExample& ex : corpus) {
        if (!ex.label) continue;
        ++positives;
        for (const auto& [index, value] : featurize(ex.text).entries) {
            sums[index] += value;
        }
    }
    FeatureVector centroid;
    centroid.entries.reserve(sums.size());
    for (const auto& [index, total] : sums) {
        centroid.entries.emplace_back(index, static_cast<float>(total / static_cast<double>(positives)));
    }
    return centroid;
}

ClassifierModel train_on(const std::vector<LabeledExample>& corpus, ClassifyTask task,
                         std::uint64_t seed) {
    TrainOptions opts;
    opts.seed = seed;
    return train(split_dataset(corpus, seed), task, opts);
}

// Labeled telemetry for the witness scorer: simulate a mid-size event and use
// the hidden witness flag of each relevant message as the label.
WitnessScorer fit_witness_scorer(const Gazetteer& gazetteer, const FeatureVector& centroid) {
    EarthquakeEvent event;
    event.event_id = "train-witness";
    event.magnitude = 4.6;
    event.depth_km = 9.0;
    event.epicenter = {37.78, -121.98};
    event.origin_time_ms = 1'390'000'000'000;
    event.place_name = "training event";

    WorldConfig config;
    config.population = 16000;
    World world(config, event, &gazetteer, 4242);
    Geoparser geoparser(gazetteer);
    WitnessFeatureExtractor extractor(&geoparser, centroid);

    std::vector<std::pair<WitnessFeatures, bool>> rows;
    for (const RawMessage& msg : world.simulate_stream()) {
        if (!msg.truth.relevant && msg.truth.damage == DamageLabel::no_info && !msg.truth.witness) {
            // keep some clearly-negative rows too, but not the whole firehose
            if (rows.size() % 3 != 0) continue;
        }
        rows.emplace_back(extractor.extract(msg), msg.truth.witness);
    }
    return train_witness_scorer(rows);
}

struct ScenarioSpec {
    const char* file;
    const char* event_id;
    const char* place;
    double magnitude, depth_km, lat, lon;
    std::int64_t origin_ms;
    std::uint64_t seed;
    std::size_t population;
    double p_post;
    ArchetypeMix mix;
    std::size_t budget;
    double p_reply, p_collab, mu_log;
    BotFleetConfig bots;
    double relevance_threshold;  // <0 keeps the model's trained threshold
    double building_boost;       // reply-pool granularity skew
};

// Five replay scenarios spanning the magnitude range plus the reply
// enrichment demo. Counts were calibrated against the shipped models; the
// relevance threshold override is the fine-tuning knob for noisy mixes.
const ScenarioSpec kScenarios[] = {
    {"san_ramon.json", "eq-sanramon-35", "San Ramon, California", 3.5, 11.0, 37.76, -121.95,
     1'408'600'000'000, 11, 13000, 0.30, {0.104, 0.172, 0.592}, 200, 0.875, 0.82, 1.4844,
     {2, 10, 900.0, 14400.0}, -1.0, 4.0},
    {"lila.json", "eq-lila-48", "Lila, Bohol", 4.8, 81.0, 9.70, 124.12,
     1'400'300'000'000, 12, 14000, 0.30, {0.100, 0.166, 0.588}, 170, 0.95, 0.95, 2.3260,
     {2, 10, 900.0, 14400.0}, -1.0, 4.0},
    {"lamjung.json", "eq-lamjung-75", "Lamjung, Nepal", 7.5, 12.0, 28.15, 84.45,
     1'429'900'000'000, 13, 420000, 0.50, {0.0196, 0.0327, 0.8402}, 8000, 1.0, 0.97, 2.9730,
     {4, 10, 900.0, 3500.0}, -1.0, 4.0},
    {"kokopo.json", "eq-kokopo-77", "Kokopo, Papua New Guinea", 7.7, 66.0, -4.40, 152.20,
     1'430'800'000'000, 14, 66700, 0.30, {0.0162, 0.0270, 0.80}, 160, 0.94, 0.96, 3.2072,
     {2, 10, 900.0, 14400.0}, -1.0, 4.0},
    {"irving.json", "eq-irving-33", "Irving, Texas", 3.3, 6.0, 32.82, -96.93,
     1'420'900'000'000, 15, 12300, 0.30, {0.0763, 0.1272, 0.635}, 150, 0.88, 0.79, 1.9544,
     {2, 10, 900.0, 14400.0}, -1.0, 4.0},
    {"enrichment.json", "eq-enrichment-52", "San Ramon, California", 5.2, 10.0, 37.76, -121.95,
     1'432'000'000'000, 21, 25000, 0.30, {0.15, 0.25, 0.40}, 200, 0.90, 0.98, 2.0,
     {2, 10, 900.0, 14400.0}, -1.0, 12.0},
};

ScenarioConfig make_scenario(const ScenarioSpec& spec) {
    ScenarioConfig cfg;
    cfg.seed = spec.seed;
    cfg.event.event_id = spec.event_id;
    cfg.event.magnitude = spec.magnitude;
    cfg.event.depth_km = spec.depth_km;
    cfg.event.epicenter = {spec.lat, spec.lon};
    cfg.event.origin_time_ms = spec.origin_ms;
    cfg.event.place_name = spec.place;
    cfg.population = spec.population;
    cfg.p_post = spec.p_post;
    cfg.p_reply = spec.p_reply;
    cfg.p_collaborative = spec.p_collab;
    cfg.latency_mu_log = spec.mu_log;
    cfg.keywords = default_keywords();
    cfg.bots = spec.bots;
    cfg.contact_budget = spec.budget;
    cfg.mix = spec.mix;
    cfg.models.relevance = "../models/relevance.json";
    cfg.models.damage_presence = "../models/damage_presence.json";
    cfg.models.damage_info = "../models/damage_info.json";
    cfg.models.witness_scorer = "../models/witness_scorer.json";
    cfg.models.witness_centroid = "../models/witness_centroid.json";
    if (spec.relevance_threshold >= 0.0) {
        cfg.models.relevance_threshold = spec.relevance_threshold;
    }
    cfg.enrichment.building_boost = spec.building_boost;
    cfg.gazetteer_path = "../gazetteer.tsv";
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regenerate the bundled data fixtures"};
    std::string out_root = "data";
    app.add_option("--out", out_root, "output root (default: data)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        namespace fs = std::filesystem;
        fs::path root(out_root);
        fs::create_directories(root / "models");
        fs::create_directories(root / "scenarios");

        std::vector<GazetteerEntry> entries =
            synthetic_gazetteer_entries(kBundledGazetteerSize, kBundledGazetteerSeed);
        spit(root / "gazetteer.tsv", gazetteer_to_tsv(entries));
        Gazetteer gazetteer = Gazetteer::from_entries(entries);

        std::vector<LabeledExample> relevance_corpus =
            synthetic_relevance_corpus(gazetteer, kBundledCorpusSize, kRelevanceCorpusSeed);
        save_corpus((root / "corpus_relevance.jsonl").string(), relevance_corpus,
                    ClassifyTask::relevance);
        std::printf("wrote %s\n", (root / "corpus_relevance.jsonl").string().c_str());

        std::vector<LabeledExample> presence_corpus = synthetic_damage_corpus(
            gazetteer, kBundledCorpusSize, kDamageCorpusSeed, ClassifyTask::damage_presence);
        save_corpus((root / "corpus_damage.jsonl").string(), presence_corpus,
                    ClassifyTask::damage_presence);
        std::printf("wrote %s\n", (root / "corpus_damage.jsonl").string().c_str());

        std::vector<LabeledExample> info_corpus = synthetic_damage_corpus(
            gazetteer, kBundledCorpusSize, kDamageCorpusSeed + 1, ClassifyTask::damage_info);
        save_corpus((root / "corpus_damage_info.jsonl").string(), info_corpus,
                    ClassifyTask::damage_info);
        std::printf("wrote %s\n", (root / "corpus_damage_info.jsonl").string().c_str());

        train_on(relevance_corpus, ClassifyTask::relevance, 7)
            .save((root / "models" / "relevance.json").string());
        std::printf("wrote %s\n", (root / "models" / "relevance.json").string().c_str());
        train_on(presence_corpus, ClassifyTask::damage_presence, 8)
            .save((root / "models" / "damage_presence.json").string());
        std::printf("wrote %s\n", (root / "models" / "damage_presence.json").string().c_str());
        train_on(info_corpus, ClassifyTask::damage_info, 9)
            .save((root / "models" / "damage_info.json").string());
        std::printf("wrote %s\n", (root / "models" / "damage_info.json").string().c_str());

        FeatureVector centroid = corpus_centroid(relevance_corpus);
        spit(root / "models" / "witness_centroid.json", feature_vector_to_json(centroid));
        fit_witness_scorer(gazetteer, centroid)
            .save((root / "models" / "witness_scorer.json").string());
        std::printf("wrote %s\n", (root / "models" / "witness_scorer.json").string().c_str());

        std::vector<EarthquakeEvent> events;
        for (const ScenarioSpec& spec : kScenarios) {
            ScenarioConfig cfg = make_scenario(spec);
            spit(root / "scenarios" / spec.file, scenario_to_json(cfg));
            if (std::string(spec.file) != "enrichment.json") {
                events.push_back(cfg.event);
            }
        }
        spit(root / "feed.json", serialize_feed(events));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "genfixtures failed: %s\n", e.what());
        return 2;
    }
    return 0;
}
