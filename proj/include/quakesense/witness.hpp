#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "quakesense/classify.hpp"
#include "quakesense/geoparse.hpp"
#include "quakesense/types.hpp"

namespace quakesense {

struct WitnessFeatures {
    double first_person_rate = 0.0;   // first-person pronouns / tokens, [0,1]
    double exclamation_rate = 0.0;    // '!' per token, clamped to [0,1]
    double token_count = 0.0;
    double lexicon_cosine = 0.0;      // similarity to the witness centroid, [0,1]
    double sentiment = 0.0;           // lexicon polarity, [-1,1]
    double entity_count = 0.0;        // gazetteer mentions found in the text
    double geotag = 0.0;              // 0/1
    double account_age_bucket = 0.0;  // {0,1,2,3}

    // Stable (name, value) view matching the scorer file's key set.
    std::vector<std::pair<std::string, double>> named() const;

    WitnessFeatures operator+(const WitnessFeatures& other) const;
};

class WitnessFeatureExtractor {
public:
    // geoparser may be null (entity_count stays 0); the centroid comes from
    // the bundled witness-template corpus.
    WitnessFeatureExtractor(const Geoparser* geoparser, FeatureVector centroid);

    WitnessFeatures extract(const RawMessage& message) const;

private:
    const Geoparser* geoparser_;
    FeatureVector centroid_;
};

// Centroid persistence: {"indices": [...], "values": [...]}.
std::string feature_vector_to_json(const FeatureVector& v);
FeatureVector feature_vector_from_json(const std::string& text);

struct WitnessScorer {
    std::map<std::string, double> weights;  // keyed by WitnessFeatures names
    double bias = 0.0;

    // Linear: sum of weight * feature + bias. Unknown weight keys are
    // rejected at load time, so this never silently drops a term.
    double score(const WitnessFeatures& features) const;

    std::string to_json() const;  // flat {feature_name: weight, ..., "bias": b}
    static WitnessScorer from_json(const std::string& text);
    void save(const std::string& path) const;
    static WitnessScorer load(const std::string& path);
};

struct WitnessTrainOptions {
    int epochs = 40;
    double learning_rate = 0.05;
    double l2 = 1e-4;
    std::uint64_t seed = 1;
};

// Hinge-loss SGD over labeled feature rows; fits the bundled scorer.
WitnessScorer train_witness_scorer(const std::vector<std::pair<WitnessFeatures, bool>>& rows,
                                   const WitnessTrainOptions& opts = {});

struct ScoredMessage {
    std::string msg_id;
    std::string user_id;
    std::int64_t timestamp_ms = 0;
    bool geotagged = false;
    double score = 0.0;
};

ScoredMessage score_message(const WitnessFeatureExtractor& extractor, const WitnessScorer& scorer,
                            const RawMessage& message);

struct ContactTarget {
    std::string user_id;
    std::string source_msg_id;
    double witness_score = 0.0;
    QuestionKind question_kind = QuestionKind::ask_geo;

    bool operator==(const ContactTarget&) const = default;
};

// One target per user (that user's best message), top `budget` by
// (score desc, timestamp asc, user_id asc), excluding already-contacted
// users. ask_damage for geotagged sources, ask_geo otherwise.
std::vector<ContactTarget> select_candidates(const std::vector<ScoredMessage>& scored,
                                             std::size_t budget,
                                             const std::set<std::string>& already_contacted);

}  // namespace quakesense
