#pragma once

#include <string>
#include <vector>

#include "quakesense/dispatch.hpp"
#include "quakesense/metrics.hpp"
#include "quakesense/scenario.hpp"

namespace quakesense {

struct PipelineResult {
    EventLog log;
    MetricsReport report;
    std::vector<CrisisCell> cells;
    std::vector<RawMessage> platform_log;  // everything the simulated platform carried
    ContactLedger ledger;
    double grid_cell_deg = 0.25;
};

// Runs one campaign end to end, entirely in memory: simulate the platform,
// collect under the crawl cap, filter for relevance, score and select
// witnesses, dispatch questions through the bot fleet, then analyze replies
// alongside the spontaneous messages.
PipelineResult run_scenario(const ScenarioConfig& config);

// Writes message_log.jsonl, dispatch_log.jsonl, event_log.json, report.json,
// report.csv, crisis_map.geojson and contact_ledger.tsv under out_dir,
// creating it if needed.
void write_run_artifacts(const std::string& out_dir, const PipelineResult& result);

PipelineResult run_scenario_to(const ScenarioConfig& config, const std::string& out_dir);

// Rebuilds a report from a previously written run directory.
MetricsReport report_from_dir(const std::string& dir, VarietyMode variety_mode);

}  // namespace quakesense
