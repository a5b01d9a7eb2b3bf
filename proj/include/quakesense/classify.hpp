#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quakesense/types.hpp"

namespace quakesense {

inline constexpr std::uint32_t kFeatureBuckets = 1u << 18;

// Sparse L2-normalized bag of hashed unigrams + bigrams. Indices strictly
// increasing; empty text maps to the empty (zero) vector.
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, float>> entries;

    double dot(std::span<const float> weights) const;
    double cosine(const FeatureVector& other) const;
    double norm() const;
};

std::vector<std::string> tokenize(const std::string& text);
FeatureVector featurize(const std::string& text);

enum class ClassifyTask { relevance, damage_presence, damage_info };

std::string to_string(ClassifyTask task);
ClassifyTask task_from_string(const std::string& s);

struct LabeledExample {
    std::string text;
    bool label = false;
};

struct DatasetSplit {
    std::vector<LabeledExample> train;      // 64%
    std::vector<LabeledExample> validation; // 16%
    std::vector<LabeledExample> test;       // 20%
};

// Stratified 64/16/20 split; per-class proportions preserved within one
// example. Throws ValidationError on a single-class corpus.
DatasetSplit split_dataset(const std::vector<LabeledExample>& corpus, std::uint64_t seed);

struct TrainOptions {
    int epochs = 12;
    double learning_rate = 0.25;
    double l2 = 1e-6;
    std::uint64_t seed = 1;
};

struct ClassifierModel {
    std::vector<float> weights;  // dense, kFeatureBuckets
    double bias = 0.0;
    ClassifyTask task = ClassifyTask::relevance;
    double threshold = 0.5;

    ClassifierModel() : weights(kFeatureBuckets, 0.0f) {}

    std::string to_json() const;  // sparse: only non-zero weights are stored
    static ClassifierModel from_json(const std::string& text);
    void save(const std::string& path) const;
    static ClassifierModel load(const std::string& path);
};

// Online logistic regression over the training split; the decision threshold
// is then chosen on the validation split to maximize F1. Throws TrainingError
// (naming the epoch) if the loss goes non-finite.
ClassifierModel train(const DatasetSplit& split, ClassifyTask task,
                      const TrainOptions& opts = {});

// sigmoid(w . featurize(text) + bias)
double score(const ClassifierModel& model, const std::string& text);

// Keeps messages with score >= threshold, preserving order. Throws UsageError
// unless the model's task is `relevance`.
std::vector<RawMessage> filter_relevant(const ClassifierModel& model,
                                        const std::vector<RawMessage>& messages);

// Cascade of the two binary damage models. Empty text is always no_info.
DamageLabel classify_damage(const ClassifierModel& presence_model,
                            const ClassifierModel& info_model, const std::string& text);

// Area under the ROC curve: fraction of (positive, negative) pairs ranked
// correctly, ties counted 1/2. O(n log n). Throws ValidationError when either
// class is missing.
double auc(const std::vector<double>& scores, const std::vector<bool>& labels);

struct EvalReport {
    double auc = 0.0;
    double threshold = 0.0;
    std::size_t train_size = 0, validation_size = 0, test_size = 0;
    // confusion counts on the test split at the chosen threshold
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Full 64/16/20 protocol on a labeled corpus: split, train, evaluate on test.
EvalReport evaluate_corpus(const std::vector<LabeledExample>& corpus, ClassifyTask task,
                           std::uint64_t seed, const TrainOptions& opts = {});

// Corpus file I/O: JSON Lines, {"text": ..., "label": 0|1, "task": ...}.
std::vector<LabeledExample> load_corpus(const std::string& path, ClassifyTask task);
void save_corpus(const std::string& path, const std::vector<LabeledExample>& corpus,
                 ClassifyTask task);

}  // namespace quakesense
