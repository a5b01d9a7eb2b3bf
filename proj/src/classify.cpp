#include "quakesense/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "quakesense/errors.hpp"
#include "quakesense/rng.hpp"

namespace quakesense {

using nlohmann::ordered_json;

double FeatureVector::dot(std::span<const float> weights) const {
    double s = 0.0;
    for (const auto& [idx, val] : entries) s += double(weights[idx]) * double(val);
    return s;
}

double FeatureVector::cosine(const FeatureVector& other) const {
    double s = 0.0;
    auto it = other.entries.begin();
    for (const auto& [idx, val] : entries) {
        while (it != other.entries.end() && it->first < idx) ++it;
        if (it == other.entries.end()) break;
        if (it->first == idx) s += double(val) * double(it->second);
    }
    return s;  // both sides are unit vectors
}

double FeatureVector::norm() const {
    double s = 0.0;
    for (const auto& [idx, val] : entries) s += double(val) * double(val);
    return std::sqrt(s);
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(char(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

namespace {

std::uint32_t bucket_of(std::string_view s) {
    return std::uint32_t(Rng::fnv1a64(s) & (kFeatureBuckets - 1));
}

}  // namespace

FeatureVector featurize(const std::string& text) {
    const auto tokens = tokenize(text);
    if (tokens.empty()) return {};

    std::map<std::uint32_t, float> acc;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        acc[bucket_of(tokens[i])] += 1.0f;
        if (i + 1 < tokens.size()) {
            acc[bucket_of(tokens[i] + "\x1f" + tokens[i + 1])] += 1.0f;
        }
    }
    FeatureVector v;
    v.entries.assign(acc.begin(), acc.end());
    double norm = 0.0;
    for (const auto& [idx, val] : v.entries) norm += double(val) * double(val);
    norm = std::sqrt(norm);
    for (auto& [idx, val] : v.entries) val = float(val / norm);
    return v;
}

std::string to_string(ClassifyTask task) {
    switch (task) {
        case ClassifyTask::relevance: return "relevance";
        case ClassifyTask::damage_presence: return "damage_presence";
        case ClassifyTask::damage_info: return "damage_info";
    }
    return "relevance";
}

ClassifyTask task_from_string(const std::string& s) {
    if (s == "relevance") return ClassifyTask::relevance;
    if (s == "damage_presence") return ClassifyTask::damage_presence;
    if (s == "damage_info") return ClassifyTask::damage_info;
    throw ParseError("unknown classifier task `" + s + "`");
}

DatasetSplit split_dataset(const std::vector<LabeledExample>& corpus, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        (corpus[i].label ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty())
        throw ValidationError("split_dataset: corpus must contain both classes");

    Rng rng(seed, "dataset-split");
    DatasetSplit out;
    for (auto* cls : {&pos, &neg}) {
        rng.shuffle(*cls);
        // largest-remainder apportionment of 64/16/20 within the class
        const std::size_t n = cls->size();
        const double fractions[3] = {0.64, 0.16, 0.20};
        std::size_t counts[3];
        double remainders[3];
        std::size_t assigned = 0;
        for (int k = 0; k < 3; ++k) {
            const double exact = fractions[k] * double(n);
            counts[k] = std::size_t(exact);
            remainders[k] = exact - double(counts[k]);
            assigned += counts[k];
        }
        while (assigned < n) {
            const int k = int(std::max_element(remainders, remainders + 3) - remainders);
            ++counts[k];
            remainders[k] = -1.0;
            ++assigned;
        }
        std::size_t at = 0;
        std::vector<LabeledExample>* dests[3] = {&out.train, &out.validation, &out.test};
        for (int k = 0; k < 3; ++k) {
            for (std::size_t j = 0; j < counts[k]; ++j) dests[k]->push_back(corpus[(*cls)[at++]]);
        }
    }
    rng.shuffle(out.train);
    rng.shuffle(out.validation);
    rng.shuffle(out.test);
    return out;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double model_score(const ClassifierModel& model, const FeatureVector& v) {
    return sigmoid(v.dot(model.weights) + model.bias);
}

// Threshold maximizing F1 on (score, label) pairs; ties resolved toward the
// smallest threshold. Scanning descending scores keeps it O(n log n).
double best_f1_threshold(std::vector<std::pair<double, bool>>& scored) {
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t total_pos =
        std::size_t(std::count_if(scored.begin(), scored.end(),
                                  [](const auto& e) { return e.second; }));
    if (total_pos == 0) return 0.5;

    double best_f1 = -1.0;
    double best_threshold = 0.5;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        if (scored[i].second) ++tp; else ++fp;
        // classify as positive everything with score >= scored[i].first;
        // only evaluate at distinct score boundaries
        if (i + 1 < scored.size() && scored[i + 1].first == scored[i].first) continue;
        const std::size_t fn = total_pos - tp;
        const double f1 = (2.0 * double(tp)) / double(2 * tp + fp + fn);
        if (f1 > best_f1 + 1e-12) {
            best_f1 = f1;
            best_threshold = scored[i].first;
        }
    }
    return best_threshold;
}

}  // namespace

ClassifierModel train(const DatasetSplit& split, ClassifyTask task, const TrainOptions& opts) {
    ClassifierModel model;
    model.task = task;

    std::vector<FeatureVector> features;
    features.reserve(split.train.size());
    for (const auto& ex : split.train) features.push_back(featurize(ex.text));

    std::vector<std::size_t> order(split.train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    Rng rng(opts.seed, "classifier-train");
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        rng.shuffle(order);
        double loss = 0.0;
        for (std::size_t i : order) {
            const auto& v = features[i];
            const double y = split.train[i].label ? 1.0 : 0.0;
            const double p = model_score(model, v);
            loss += -(y * std::log(std::max(p, 1e-12)) +
                      (1.0 - y) * std::log(std::max(1.0 - p, 1e-12)));
            const double g = p - y;
            for (const auto& [idx, val] : v.entries) {
                model.weights[idx] -= float(opts.learning_rate *
                                            (g * double(val) + opts.l2 * model.weights[idx]));
            }
            model.bias -= opts.learning_rate * g;
        }
        if (!std::isfinite(loss) || !std::isfinite(model.bias))
            throw TrainingError("training diverged at epoch " + std::to_string(epoch));
    }

    std::vector<std::pair<double, bool>> validation_scores;
    validation_scores.reserve(split.validation.size());
    for (const auto& ex : split.validation) {
        validation_scores.emplace_back(model_score(model, featurize(ex.text)), ex.label);
    }
    if (!validation_scores.empty()) {
        model.threshold = std::clamp(best_f1_threshold(validation_scores), 0.0, 1.0);
    }
    return model;
}

double score(const ClassifierModel& model, const std::string& text) {
    return model_score(model, featurize(text));
}

std::vector<RawMessage> filter_relevant(const ClassifierModel& model,
                                        const std::vector<RawMessage>& messages) {
    if (model.task != ClassifyTask::relevance)
        throw UsageError("filter_relevant needs a relevance model, got task `" +
                         to_string(model.task) + "`");
    const double threshold = std::min(model.threshold, 1.0);
    std::vector<RawMessage> kept;
    for (const auto& m : messages) {
        if (score(model, m.text) >= threshold) kept.push_back(m);
    }
    return kept;
}

DamageLabel classify_damage(const ClassifierModel& presence_model,
                            const ClassifierModel& info_model, const std::string& text) {
    if (presence_model.task != ClassifyTask::damage_presence ||
        info_model.task != ClassifyTask::damage_info)
        throw UsageError("classify_damage needs (damage_presence, damage_info) models");
    if (tokenize(text).empty()) return DamageLabel::no_info;
    if (score(presence_model, text) >= presence_model.threshold) return DamageLabel::present;
    if (score(info_model, text) >= info_model.threshold) return DamageLabel::absent_reported;
    return DamageLabel::no_info;
}

double auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size())
        throw ValidationError("auc: scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Mann-Whitney via midranks
    double pos_rank_sum = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * double(i + 1 + j);  // average of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]]) {
                pos_rank_sum += midrank;
                ++n_pos;
            } else {
                ++n_neg;
            }
        }
        i = j;
    }
    if (n_pos == 0 || n_neg == 0)
        throw ValidationError("auc: need at least one positive and one negative");
    return (pos_rank_sum - double(n_pos) * double(n_pos + 1) / 2.0) /
           (double(n_pos) * double(n_neg));
}

EvalReport evaluate_corpus(const std::vector<LabeledExample>& corpus, ClassifyTask task,
                           std::uint64_t seed, const TrainOptions& opts) {
    const DatasetSplit split = split_dataset(corpus, seed);
    TrainOptions train_opts = opts;
    train_opts.seed = seed;
    const ClassifierModel model = train(split, task, train_opts);

    EvalReport report;
    report.train_size = split.train.size();
    report.validation_size = split.validation.size();
    report.test_size = split.test.size();
    report.threshold = model.threshold;

    std::vector<double> scores;
    std::vector<bool> labels;
    for (const auto& ex : split.test) {
        const double s = score(model, ex.text);
        scores.push_back(s);
        labels.push_back(ex.label);
        const bool predicted = s >= model.threshold;
        if (predicted && ex.label) ++report.tp;
        else if (predicted && !ex.label) ++report.fp;
        else if (!predicted && !ex.label) ++report.tn;
        else ++report.fn;
    }
    report.auc = auc(scores, labels);
    return report;
}

std::string ClassifierModel::to_json() const {
    ordered_json doc;
    doc["format"] = "quakesense-classifier";
    doc["version"] = 1;
    doc["task"] = quakesense::to_string(task);
    doc["bias"] = bias;
    doc["threshold"] = threshold;
    doc["buckets"] = kFeatureBuckets;
    ordered_json idx = ordered_json::array();
    ordered_json val = ordered_json::array();
    for (std::uint32_t i = 0; i < kFeatureBuckets; ++i) {
        if (weights[i] != 0.0f) {
            idx.push_back(i);
            val.push_back(weights[i]);
        }
    }
    doc["indices"] = std::move(idx);
    doc["values"] = std::move(val);
    return doc.dump() + "\n";
}

ClassifierModel ClassifierModel::from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("classifier model is not valid JSON: ") + e.what());
    }
    if (doc.value("format", "") != "quakesense-classifier")
        throw ParseError("not a classifier model file");
    if (doc.value("version", 0) != 1)
        throw ParseError("unsupported classifier model version");
    if (doc.value("buckets", 0u) != kFeatureBuckets)
        throw ParseError("classifier model bucket count mismatch");
    ClassifierModel model;
    model.task = task_from_string(doc.at("task").get<std::string>());
    model.bias = doc.at("bias").get<double>();
    model.threshold = doc.at("threshold").get<double>();
    const auto& idx = doc.at("indices");
    const auto& val = doc.at("values");
    if (idx.size() != val.size()) throw ParseError("indices/values length mismatch");
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto bucket = idx[i].get<std::uint32_t>();
        if (bucket >= kFeatureBuckets) throw ParseError("weight index out of range");
        model.weights[bucket] = val[i].get<float>();
    }
    if (!std::isfinite(model.bias) || model.threshold < 0.0 || model.threshold > 1.0)
        throw ValidationError("classifier model has invalid bias/threshold");
    return model;
}

void ClassifierModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write model file `" + path + "`");
    out << to_json();
}

ClassifierModel ClassifierModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read model file `" + path + "`");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::vector<LabeledExample> load_corpus(const std::string& path, ClassifyTask task) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read corpus file `" + path + "`");
    std::vector<LabeledExample> corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const ordered_json row = ordered_json::parse(line);
            if (row.contains("task") &&
                task_from_string(row["task"].get<std::string>()) != task) {
                continue;  // mixed-task corpora are allowed; keep only the requested task
            }
            LabeledExample ex;
            ex.text = row.at("text").get<std::string>();
            ex.label = row.at("label").get<int>() != 0;
            corpus.push_back(std::move(ex));
        } catch (const ordered_json::exception& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return corpus;
}

void save_corpus(const std::string& path, const std::vector<LabeledExample>& corpus,
                 ClassifyTask task) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write corpus file `" + path + "`");
    for (const auto& ex : corpus) {
        ordered_json row;
        row["text"] = ex.text;
        row["label"] = ex.label ? 1 : 0;
        row["task"] = to_string(task);
        out << row.dump() << "\n";
    }
}

}  // namespace quakesense
