#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "quakesense/classify.hpp"
#include "quakesense/errors.hpp"
#include "quakesense/fixtures.hpp"
#include "quakesense/pipeline.hpp"
#include "quakesense/reference.hpp"

namespace {

// 0 success, 1 config or usage error, 2 runtime failure, 3 validation or
// oracle mismatch.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitValidation = 3;

using namespace quakesense;

std::string format_metric(const MetricValue& metric, const char* unit) {
    if (!metric.value) return "undefined (" + metric.undefined_reason + ")";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f%s", *metric.value, unit);
    return buf;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override) {
    ScenarioConfig config = load_scenario_config(config_path);
    if (seed_override) config.seed = *seed_override;
    PipelineResult result = run_scenario_to(config, out_dir);
    const MetricsReport& r = result.report;
    std::printf("event      %s (%s, M%.1f)\n", r.event_id.c_str(), r.place_name.c_str(), r.magnitude);
    std::printf("collected  %zu (crawl-dropped %zu)\n", r.collected, r.counters.dropped_by_crawl);
    std::printf("relevant   %zu\n", r.relevant);
    std::printf("questions  %zu sent, %zu expired, %zu duplicate-suppressed\n",
                r.counters.questions_sent, r.counters.expired_targets,
                r.counters.duplicate_suppressed);
    std::printf("replies    %zu (gain %s, collaborative %s, latency %s)\n", r.replies,
                r.gain.value ? format_gain(*r.gain.value).c_str() : "undefined",
                r.collaborative.value ? format_percent(*r.collaborative.value).c_str() : "undefined",
                format_metric(r.latency_min, " min").c_str());
    std::printf("artifacts  %s\n", out_dir.c_str());
    return kExitOk;
}

int cmd_report(const std::string& log_dir, const std::string& variety) {
    VarietyMode mode;
    if (variety == "per_message") {
        mode = VarietyMode::per_message;
    } else if (variety == "event_level") {
        mode = VarietyMode::event_level;
    } else {
        throw UsageError("--variety must be per_message or event_level");
    }
    MetricsReport report = report_from_dir(log_dir, mode);
    std::fputs(report.to_json().c_str(), stdout);
    return kExitOk;
}

int cmd_eval(const std::string& corpus_path, const std::string& task_name, std::uint64_t seed) {
    ClassifyTask task = task_from_string(task_name);
    std::vector<LabeledExample> corpus = load_corpus(corpus_path, task);
    EvalReport report = evaluate_corpus(corpus, task, seed);
    std::printf("task       %s\n", task_name.c_str());
    std::printf("examples   %zu (train %zu / validation %zu / test %zu)\n",
                report.train_size + report.validation_size + report.test_size, report.train_size,
                report.validation_size, report.test_size);
    std::printf("auc        %.4f\n", report.auc);
    std::printf("threshold  %.4f\n", report.threshold);
    std::printf("confusion  tp %zu  fp %zu  tn %zu  fn %zu\n", report.tp, report.fp, report.tn,
                report.fn);
    return kExitOk;
}

int cmd_geoparse(const std::string& gazetteer_path, const std::string& text_arg,
                 const std::string& file_arg, const std::string& epicenter_arg) {
    Gazetteer gazetteer = Gazetteer::load(gazetteer_path);
    Geoparser parser(gazetteer);
    std::string text = text_arg;
    if (!file_arg.empty()) {
        std::ifstream in(file_arg, std::ios::binary);
        if (!in) throw ConfigError("cannot open text file: " + file_arg);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    std::optional<LatLon> epicenter;
    if (!epicenter_arg.empty()) {
        double lat = 0.0, lon = 0.0;
        char tail = '\0';
        if (std::sscanf(epicenter_arg.c_str(), "%lf,%lf%c", &lat, &lon, &tail) != 2 ||
            !valid_latlon({lat, lon})) {
            throw UsageError("--epicenter must be \"lat,lon\"");
        }
        epicenter = LatLon{lat, lon};
    }
    for (const PlaceTag& tag : parser.parse(text, epicenter)) {
        nlohmann::ordered_json row;
        row["surface"] = tag.surface;
        row["begin"] = tag.begin;
        row["end"] = tag.end;
        row["place_id"] = tag.place_id;
        row["lat"] = tag.position.lat;
        row["lon"] = tag.position.lon;
        row["granularity"] = to_string(tag.granularity);
        std::printf("%s\n", row.dump().c_str());
    }
    return kExitOk;
}

int cmd_oracle_check(std::size_t iterations, std::uint64_t seed, bool corrupt) {
    OracleCheckOptions options;
    options.iterations = iterations;
    options.seed = seed;
    options.corrupt_tie_rule = corrupt;
    OracleCheckResult result = oracle_check(bundled_gazetteer(), options);
    std::printf("geoparse cases  %zu\n", result.geoparse_cases);
    std::printf("metric cases    %zu\n", result.metric_cases);
    std::printf("mismatches      %zu\n", result.mismatch_count);
    for (const std::string& line : result.mismatches) {
        std::printf("  %s\n", line.c_str());
    }
    if (!result.ok()) {
        std::fprintf(stderr, "oracle check FAILED\n");
        return kExitValidation;
    }
    std::printf("oracle check OK\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"earthquake crowdsensing campaign simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed_override;
    CLI::App* run = app.add_subcommand("run", "run a full campaign from a scenario config");
    run->add_option("--config", config_path, "scenario config JSON")->required();
    run->add_option("--out", out_dir, "output directory for run artifacts")->required();
    run->add_option("--seed", seed_override, "override the config's seed");

    std::string log_dir, variety = "per_message";
    CLI::App* report = app.add_subcommand("report", "rebuild a report from run artifacts");
    report->add_option("--log", log_dir, "run directory written by `run`")->required();
    report->add_option("--variety", variety, "per_message or event_level");

    std::string corpus_path, task_name;
    std::uint64_t eval_seed = 1;
    CLI::App* eval = app.add_subcommand("eval", "train/test a classifier on a labeled corpus");
    eval->add_option("--corpus", corpus_path, "JSONL corpus")->required();
    eval->add_option("--task", task_name, "relevance, damage_presence or damage_info")->required();
    eval->add_option("--seed", eval_seed, "split/train seed");

    std::string gaz_path, text_arg, file_arg, epicenter_arg;
    CLI::App* geo = app.add_subcommand("geoparse", "tag place mentions in text");
    geo->add_option("--gazetteer", gaz_path, "gazetteer TSV")->required();
    geo->add_option("--text", text_arg, "text to parse");
    geo->add_option("--file", file_arg, "file with text to parse");
    geo->add_option("--epicenter", epicenter_arg, "\"lat,lon\" used to break ties");

    std::size_t oracle_n = 1000;
    std::uint64_t oracle_seed = 1;
    bool corrupt = false;
    CLI::App* oracle = app.add_subcommand("oracle-check",
                                          "randomized cross-check of the geoparser and metrics "
                                          "against independent reference implementations");
    oracle->add_option("--n", oracle_n, "iterations (default 1000)");
    oracle->add_option("--seed", oracle_seed, "base seed");
    oracle->add_flag("--corrupt-tie-rule", corrupt,
                     "negative control: corrupt the reference tie rule; mismatches are expected");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seed_override);
        if (report->parsed()) return cmd_report(log_dir, variety);
        if (eval->parsed()) return cmd_eval(corpus_path, task_name, eval_seed);
        if (geo->parsed()) {
            if (text_arg.empty() == file_arg.empty()) {
                throw UsageError("geoparse needs exactly one of --text or --file");
            }
            return cmd_geoparse(gaz_path, text_arg, file_arg, epicenter_arg);
        }
        if (oracle->parsed()) return cmd_oracle_check(oracle_n, oracle_seed, corrupt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitConfig;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitConfig;
}
