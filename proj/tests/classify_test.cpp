#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "quakesense/classify.hpp"
#include "quakesense/errors.hpp"
#include "quakesense/rng.hpp"

using namespace quakesense;

namespace {

// two disjoint vocabularies: trivially separable
std::vector<LabeledExample> separable_corpus(std::size_t per_class) {
    const std::vector<std::string> pos_words{"alpha", "beta", "gamma", "delta", "epsilon"};
    const std::vector<std::string> neg_words{"omega", "sigma", "tau", "rho", "lambda"};
    std::vector<LabeledExample> corpus;
    Rng rng(5);
    for (std::size_t i = 0; i < per_class; ++i) {
        std::string p, n;
        for (int w = 0; w < 4; ++w) {
            p += pos_words[rng.below(pos_words.size())] + " ";
            n += neg_words[rng.below(neg_words.size())] + " ";
        }
        corpus.push_back({p, true});
        corpus.push_back({n, false});
    }
    return corpus;
}

}  // namespace

TEST_CASE("featurize maps empty text to the zero vector") {
    CHECK(featurize("").entries.empty());
    CHECK(featurize("").norm() == doctest::Approx(0.0));
    CHECK(featurize("...!?").entries.empty());
}

TEST_CASE("featurize folds case") {
    const auto a = featurize("Quake quake");
    const auto b = featurize("quake quake");
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].first == b.entries[i].first);
        CHECK(a.entries[i].second == b.entries[i].second);
    }
}

TEST_CASE("non-empty feature vectors are unit length with sorted indices") {
    for (const char* text : {"one", "felt a strong earthquake in town",
                             "the quick brown fox jumps over the lazy dog"}) {
        const auto v = featurize(text);
        // Entries hold float weights, so unit norm is only exact to float precision.
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-6));
        for (std::size_t i = 1; i < v.entries.size(); ++i) {
            CHECK(v.entries[i - 1].first < v.entries[i].first);
        }
    }
}

TEST_CASE("cosine of a vector with itself is one") {
    const auto v = featurize("shaking here right now");
    CHECK(v.cosine(v) == doctest::Approx(1.0).epsilon(1e-6));
    const auto zero = featurize("");
    CHECK(zero.cosine(v) == doctest::Approx(0.0));
}

TEST_CASE("stratified split keeps class proportions exactly on clean sizes") {
    std::vector<LabeledExample> corpus;
    for (int i = 0; i < 50; ++i) corpus.push_back({"pos " + std::to_string(i), true});
    for (int i = 0; i < 50; ++i) corpus.push_back({"neg " + std::to_string(i), false});

    const DatasetSplit split = split_dataset(corpus, 7);
    CHECK(split.train.size() == 64);
    CHECK(split.validation.size() == 16);
    CHECK(split.test.size() == 20);

    auto positives = [](const std::vector<LabeledExample>& xs) {
        std::size_t n = 0;
        for (const auto& x : xs) n += x.label ? 1 : 0;
        return n;
    };
    CHECK(positives(split.train) == 32);
    CHECK(positives(split.validation) == 8);
    CHECK(positives(split.test) == 10);
}

TEST_CASE("split is deterministic, disjoint and exhaustive") {
    const auto corpus = separable_corpus(60);
    const auto a = split_dataset(corpus, 42);
    const auto b = split_dataset(corpus, 42);
    CHECK(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i) CHECK(a.train[i].text == b.train[i].text);

    CHECK(a.train.size() + a.validation.size() + a.test.size() == corpus.size());

    std::vector<std::string> all;
    for (const auto& x : a.train) all.push_back(x.text + (x.label ? "1" : "0"));
    for (const auto& x : a.validation) all.push_back(x.text + (x.label ? "1" : "0"));
    for (const auto& x : a.test) all.push_back(x.text + (x.label ? "1" : "0"));
    std::vector<std::string> source;
    for (const auto& x : corpus) source.push_back(x.text + (x.label ? "1" : "0"));
    std::sort(all.begin(), all.end());
    std::sort(source.begin(), source.end());
    CHECK(all == source);
}

TEST_CASE("single-class corpora cannot be split") {
    std::vector<LabeledExample> corpus;
    for (int i = 0; i < 20; ++i) corpus.push_back({"only pos " + std::to_string(i), true});
    CHECK_THROWS_AS(split_dataset(corpus, 1), ValidationError);
}

TEST_CASE("a zero model scores one half everywhere") {
    ClassifierModel model;
    CHECK(score(model, "anything at all") == doctest::Approx(0.5));
    CHECK(score(model, "") == doctest::Approx(0.5));
}

TEST_CASE("score is monotone in bias") {
    ClassifierModel model;
    double prev = 0.0;
    for (double b : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        model.bias = b;
        const double s = score(model, "felt the quake");
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("training separates a toy corpus perfectly") {
    const auto report = evaluate_corpus(separable_corpus(100), ClassifyTask::relevance, 3);
    CHECK(report.auc == doctest::Approx(1.0));
    CHECK(report.fn + report.tp == 20);  // test split positives
    CHECK(report.fp == 0);
    CHECK(report.fn == 0);
}

TEST_CASE("shuffled labels score near chance") {
    auto corpus = separable_corpus(100);
    Rng rng(2024);
    for (auto& ex : corpus) ex.label = rng.bernoulli(0.5);
    const auto report = evaluate_corpus(corpus, ClassifyTask::relevance, 3);
    CHECK(report.auc >= 0.4);
    CHECK(report.auc <= 0.6);
}

TEST_CASE("training is reproducible for a fixed seed") {
    const auto corpus = separable_corpus(40);
    TrainOptions opts;
    opts.seed = 11;
    const auto m1 = train(split_dataset(corpus, 11), ClassifyTask::relevance, opts);
    const auto m2 = train(split_dataset(corpus, 11), ClassifyTask::relevance, opts);
    CHECK(m1.bias == m2.bias);
    CHECK(m1.threshold == m2.threshold);
    CHECK(m1.weights == m2.weights);
}

TEST_CASE("model JSON round trip") {
    const auto corpus = separable_corpus(30);
    const auto model = train(split_dataset(corpus, 9), ClassifyTask::damage_presence);
    const auto back = ClassifierModel::from_json(model.to_json());
    CHECK(back.task == model.task);
    CHECK(back.bias == model.bias);
    CHECK(back.threshold == model.threshold);
    CHECK(back.weights == model.weights);
}

TEST_CASE("filter_relevant demands a relevance model") {
    ClassifierModel damage;
    damage.task = ClassifyTask::damage_presence;
    std::vector<RawMessage> msgs(1);
    msgs[0].msg_id = "m1";
    CHECK_THROWS_AS(filter_relevant(damage, msgs), UsageError);
}

TEST_CASE("filter_relevant keeps order and respects the threshold") {
    ClassifierModel model;  // zero weights: every message scores 0.5
    model.task = ClassifyTask::relevance;

    std::vector<RawMessage> msgs(3);
    msgs[0].msg_id = "m1";
    msgs[1].msg_id = "m2";
    msgs[2].msg_id = "m3";

    model.threshold = 0.0;  // identity filter
    auto kept = filter_relevant(model, msgs);
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].msg_id == "m1");
    CHECK(kept[2].msg_id == "m3");

    model.threshold = 0.5;  // scores equal the threshold: kept
    CHECK(filter_relevant(model, msgs).size() == 3);

    model.threshold = 0.51;
    CHECK(filter_relevant(model, msgs).empty());
}

TEST_CASE("auc hand cases") {
    CHECK(auc({0.9, 0.8, 0.3}, {true, false, true}) == doctest::Approx(0.5));
    CHECK(auc({0.1, 0.9, 0.2, 0.8}, {false, true, false, true}) == doctest::Approx(1.0));
    CHECK(auc({0.5, 0.5, 0.5, 0.5}, {true, false, true, false}) == doctest::Approx(0.5));
    // reversed ranking
    CHECK(auc({0.9, 0.1}, {false, true}) == doctest::Approx(0.0));
}

TEST_CASE("auc rejects single-class input") {
    CHECK_THROWS_AS(auc({0.5, 0.6}, {true, true}), ValidationError);
    CHECK_THROWS_AS(auc({0.5, 0.6}, {false, false}), ValidationError);
    CHECK_THROWS_AS(auc({}, {}), ValidationError);
}

TEST_CASE("empty text is always no_info for damage") {
    ClassifierModel presence;
    presence.task = ClassifyTask::damage_presence;
    presence.bias = 5.0;  // would otherwise score ~1
    ClassifierModel info;
    info.task = ClassifyTask::damage_info;
    info.bias = 5.0;
    CHECK(classify_damage(presence, info, "") == DamageLabel::no_info);
}

TEST_CASE("damage cascade order: presence, then info, then no_info") {
    ClassifierModel presence;
    presence.task = ClassifyTask::damage_presence;
    ClassifierModel info;
    info.task = ClassifyTask::damage_info;

    presence.bias = 5.0;
    info.bias = 5.0;
    CHECK(classify_damage(presence, info, "walls cracked") == DamageLabel::present);

    presence.bias = -5.0;
    CHECK(classify_damage(presence, info, "no damage here") == DamageLabel::absent_reported);

    info.bias = -5.0;
    CHECK(classify_damage(presence, info, "what happened") == DamageLabel::no_info);
}

TEST_CASE("corpus file round trip") {
    const auto corpus = separable_corpus(10);
    const auto path = (std::filesystem::temp_directory_path() / "qs_corpus_test.jsonl").string();
    save_corpus(path, corpus, ClassifyTask::relevance);
    const auto back = load_corpus(path, ClassifyTask::relevance);
    REQUIRE(back.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(back[i].text == corpus[i].text);
        CHECK(back[i].label == corpus[i].label);
    }
    // rows carry their task tag, so loading as another task filters them out
    CHECK(load_corpus(path, ClassifyTask::damage_presence).empty());
    std::remove(path.c_str());
}

TEST_CASE("task names round trip") {
    for (auto task : {ClassifyTask::relevance, ClassifyTask::damage_presence,
                      ClassifyTask::damage_info}) {
        CHECK(task_from_string(to_string(task)) == task);
    }
    CHECK_THROWS_AS(task_from_string("sentiment"), ParseError);
}
