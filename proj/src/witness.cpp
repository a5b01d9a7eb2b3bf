#include "quakesense/witness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "quakesense/errors.hpp"
#include "quakesense/rng.hpp"

namespace quakesense {

using ordered_json = nlohmann::ordered_json;

namespace {

const std::unordered_set<std::string>& first_person_words() {
    static const std::unordered_set<std::string> words = {
        "i", "we", "my", "our", "me", "us", "mine", "ours", "myself", "ourselves"};
    return words;
}

// Tiny polarity lexicon; enough to separate calm all-clear posts from
// distressed damage reports.
const std::unordered_map<std::string, int>& sentiment_lexicon() {
    static const std::unordered_map<std::string, int> lex = {
        {"safe", 1},     {"fine", 1},      {"ok", 1},        {"okay", 1},
        {"good", 1},     {"luckily", 1},   {"calm", 1},      {"relief", 1},
        {"relieved", 1}, {"thankful", 1},  {"happy", 1},     {"awesome", 1},
        {"best", 1},     {"great", 1},     {"decent", 1},    {"love", 1},
        {"worth", 1},    {"scared", -1},   {"scary", -1},    {"terrible", -1},
        {"awful", -1},   {"damage", -1},   {"damaged", -1},  {"collapsed", -1},
        {"cracked", -1}, {"broken", -1},   {"fallen", -1},   {"panic", -1},
        {"fear", -1},    {"racing", -1},   {"hurt", -1},     {"injured", -1},
        {"dead", -1},    {"destroyed", -1},{"smashed", -1},  {"shattered", -1},
        {"disaster", -1},{"emergency", -1},{"rubble", -1},   {"snapped", -1}};
    return lex;
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {
        "first_person_rate", "exclamation_rate", "token_count", "lexicon_cosine",
        "sentiment",         "entity_count",     "geotag",      "account_age_bucket"};
    return names;
}

}  // namespace

std::vector<std::pair<std::string, double>> WitnessFeatures::named() const {
    return {{"first_person_rate", first_person_rate},
            {"exclamation_rate", exclamation_rate},
            {"token_count", token_count},
            {"lexicon_cosine", lexicon_cosine},
            {"sentiment", sentiment},
            {"entity_count", entity_count},
            {"geotag", geotag},
            {"account_age_bucket", account_age_bucket}};
}

WitnessFeatures WitnessFeatures::operator+(const WitnessFeatures& other) const {
    WitnessFeatures out;
    out.first_person_rate = first_person_rate + other.first_person_rate;
    out.exclamation_rate = exclamation_rate + other.exclamation_rate;
    out.token_count = token_count + other.token_count;
    out.lexicon_cosine = lexicon_cosine + other.lexicon_cosine;
    out.sentiment = sentiment + other.sentiment;
    out.entity_count = entity_count + other.entity_count;
    out.geotag = geotag + other.geotag;
    out.account_age_bucket = account_age_bucket + other.account_age_bucket;
    return out;
}

WitnessFeatureExtractor::WitnessFeatureExtractor(const Geoparser* geoparser,
                                                 FeatureVector centroid)
    : geoparser_(geoparser), centroid_(std::move(centroid)) {}

WitnessFeatures WitnessFeatureExtractor::extract(const RawMessage& message) const {
    WitnessFeatures f;
    const auto tokens = tokenize(message.text);
    if (!tokens.empty()) {
        std::size_t first_person = 0;
        int polarity_hits = 0, polarity_sum = 0;
        for (const auto& tok : tokens) {
            if (first_person_words().count(tok)) ++first_person;
            const auto it = sentiment_lexicon().find(tok);
            if (it != sentiment_lexicon().end()) {
                ++polarity_hits;
                polarity_sum += it->second;
            }
        }
        f.first_person_rate = double(first_person) / double(tokens.size());
        const auto exclamations =
            std::count(message.text.begin(), message.text.end(), '!');
        f.exclamation_rate = std::min(1.0, double(exclamations) / double(tokens.size()));
        f.token_count = double(tokens.size());
        if (polarity_hits > 0) f.sentiment = double(polarity_sum) / double(polarity_hits);
        const FeatureVector v = featurize(message.text);
        f.lexicon_cosine = std::max(0.0, v.cosine(centroid_));
    }
    if (geoparser_ != nullptr) {
        f.entity_count = double(geoparser_->parse(message.text).size());
    }
    f.geotag = message.geotag ? 1.0 : 0.0;
    // stand-in user metadata: a stable pseudo-bucket derived from the author id
    f.account_age_bucket = double(Rng::fnv1a64(message.author_id) % 4);
    return f;
}

std::string feature_vector_to_json(const FeatureVector& v) {
    ordered_json indices = ordered_json::array();
    ordered_json values = ordered_json::array();
    for (const auto& [idx, val] : v.entries) {
        indices.push_back(idx);
        values.push_back(val);
    }
    ordered_json doc;
    doc["indices"] = std::move(indices);
    doc["values"] = std::move(values);
    return doc.dump();
}

FeatureVector feature_vector_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
        const auto indices = doc.at("indices").get<std::vector<std::uint32_t>>();
        const auto values = doc.at("values").get<std::vector<float>>();
        if (indices.size() != values.size()) {
            throw ParseError("feature vector: indices/values length mismatch");
        }
        FeatureVector v;
        v.entries.reserve(indices.size());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            v.entries.emplace_back(indices[i], values[i]);
        }
        return v;
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("feature vector: ") + e.what());
    }
}

double WitnessScorer::score(const WitnessFeatures& features) const {
    double total = bias;
    for (const auto& [name, value] : features.named()) {
        const auto it = weights.find(name);
        if (it != weights.end()) total += it->second * value;
    }
    return total;
}

std::string WitnessScorer::to_json() const {
    // Emit present weights only, in canonical feature order, so a sparse
    // scorer round trips losslessly and trained files stay deterministic.
    ordered_json doc;
    for (const auto& name : feature_names()) {
        const auto it = weights.find(name);
        if (it != weights.end()) doc[name] = it->second;
    }
    doc["bias"] = bias;
    return doc.dump(2) + "\n";
}

WitnessScorer WitnessScorer::from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("scorer file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("scorer file must be a JSON object");
    WitnessScorer scorer;
    const auto& known = feature_names();
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_number()) {
            throw ParseError("scorer weight `" + key + "` must be a number");
        }
        if (key == "bias") {
            scorer.bias = value.get<double>();
        } else if (std::find(known.begin(), known.end(), key) != known.end()) {
            scorer.weights[key] = value.get<double>();
        } else {
            throw ParseError("scorer file has unknown feature `" + key + "`");
        }
    }
    return scorer;
}

void WitnessScorer::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open `" + path + "` for writing");
    out << to_json();
}

WitnessScorer WitnessScorer::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scorer file `" + path + "`");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

WitnessScorer train_witness_scorer(const std::vector<std::pair<WitnessFeatures, bool>>& rows,
                                   const WitnessTrainOptions& opts) {
    if (rows.empty()) throw TrainingError("witness scorer needs a non-empty training set");
    const auto& names = feature_names();
    std::vector<double> w(names.size(), 0.0);
    double bias = 0.0;

    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(opts.seed, "witness-trainer");

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        rng.shuffle(order);
        for (const std::size_t i : order) {
            const auto& [features, label] = rows[i];
            const double y = label ? 1.0 : -1.0;
            const auto named = features.named();
            double margin = bias;
            for (std::size_t d = 0; d < w.size(); ++d) margin += w[d] * named[d].second;
            margin *= y;
            for (std::size_t d = 0; d < w.size(); ++d) w[d] *= 1.0 - opts.learning_rate * opts.l2;
            if (margin < 1.0) {
                for (std::size_t d = 0; d < w.size(); ++d) {
                    w[d] += opts.learning_rate * y * named[d].second;
                }
                bias += opts.learning_rate * y;
            }
        }
    }

    WitnessScorer scorer;
    for (std::size_t d = 0; d < w.size(); ++d) scorer.weights[names[d]] = w[d];
    scorer.bias = bias;
    return scorer;
}

ScoredMessage score_message(const WitnessFeatureExtractor& extractor, const WitnessScorer& scorer,
                            const RawMessage& message) {
    ScoredMessage out;
    out.msg_id = message.msg_id;
    out.user_id = message.author_id;
    out.timestamp_ms = message.timestamp_ms;
    out.geotagged = message.geotag.has_value();
    out.score = scorer.score(extractor.extract(message));
    return out;
}

std::vector<ContactTarget> select_candidates(const std::vector<ScoredMessage>& scored,
                                             std::size_t budget,
                                             const std::set<std::string>& already_contacted) {
    // per-user representative: best score, then earlier message, then msg_id
    std::unordered_map<std::string, const ScoredMessage*> best;
    for (const auto& sm : scored) {
        auto [it, inserted] = best.emplace(sm.user_id, &sm);
        if (inserted) continue;
        const ScoredMessage* cur = it->second;
        const bool better = sm.score > cur->score ||
                            (sm.score == cur->score &&
                             (sm.timestamp_ms < cur->timestamp_ms ||
                              (sm.timestamp_ms == cur->timestamp_ms && sm.msg_id < cur->msg_id)));
        if (better) it->second = &sm;
    }

    std::vector<const ScoredMessage*> ranked;
    ranked.reserve(best.size());
    for (const auto& [user_id, sm] : best) {
        if (!already_contacted.count(user_id)) ranked.push_back(sm);
    }
    std::sort(ranked.begin(), ranked.end(), [](const ScoredMessage* a, const ScoredMessage* b) {
        if (a->score != b->score) return a->score > b->score;
        if (a->timestamp_ms != b->timestamp_ms) return a->timestamp_ms < b->timestamp_ms;
        return a->user_id < b->user_id;
    });
    if (ranked.size() > budget) ranked.resize(budget);

    std::vector<ContactTarget> targets;
    targets.reserve(ranked.size());
    for (const ScoredMessage* sm : ranked) {
        ContactTarget t;
        t.user_id = sm->user_id;
        t.source_msg_id = sm->msg_id;
        t.witness_score = sm->score;
        t.question_kind = sm->geotagged ? QuestionKind::ask_damage : QuestionKind::ask_geo;
        targets.push_back(std::move(t));
    }
    return targets;
}

}  // namespace quakesense
