#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quakesense/geoparse.hpp"
#include "quakesense/metrics.hpp"
#include "quakesense/stats.hpp"

namespace quakesense {

// Independent re-implementations used to cross-check the production code.
// Each one derives its answer by the most direct route available (per-position
// pattern scans, all-pairs counting, quadrature) instead of sharing the
// production algorithms, so agreement is evidence rather than tautology.

// Brute-force matcher: at every token position try every gazetteer name and
// alias, keep the longest complete match, resolve ties with its own
// comparator. `corrupt_tie_rule` deliberately breaks that comparator; it
// exists so the equivalence harness can prove it would catch a divergence.
class NaiveGeoparser {
public:
    explicit NaiveGeoparser(const Gazetteer& gazetteer, bool corrupt_tie_rule = false);

    std::vector<PlaceTag> parse(const std::string& text,
                                std::optional<LatLon> epicenter = std::nullopt) const;

private:
    const Gazetteer* gazetteer_;
    bool corrupt_;
    // (entry index, tokenized pattern) for every name and alias
    std::vector<std::pair<std::size_t, std::vector<std::string>>> patterns_;
};

std::vector<PlaceTag> naive_geoparse(const std::string& text, const Gazetteer& gazetteer,
                                     std::optional<LatLon> epicenter = std::nullopt,
                                     bool corrupt_tie_rule = false);

// All-pairs concordance probability: positives scored above negatives count
// 1, ties count 1/2. Throws ValidationError like the production auc.
double pairwise_auc(const std::vector<double>& scores, const std::vector<bool>& labels);

// Welch's t from the defining formulas with the two-sided p obtained by
// Simpson quadrature of the t density (no shared special-function code).
SignificanceResult welch_reference(std::span<const double> a, std::span<const double> b);

struct OracleCheckOptions {
    std::size_t iterations = 1000;
    std::uint64_t seed = 1;
    bool corrupt_tie_rule = false;  // negative control, see NaiveGeoparser
    std::size_t max_reported = 8;
};

struct OracleCheckResult {
    std::size_t geoparse_cases = 0;
    std::size_t metric_cases = 0;
    std::size_t mismatch_count = 0;
    std::vector<std::string> mismatches;  // first few, each with its stream name

    bool ok() const { return mismatch_count == 0; }
};

// Randomized equivalence run: production geoparser vs NaiveGeoparser on
// generated texts, and the metric suite vs direct recomputation on generated
// event logs. Deterministic given (gazetteer, options).
OracleCheckResult oracle_check(const Gazetteer& gazetteer, const OracleCheckOptions& options);

}  // namespace quakesense
