#pragma once

#include <stdexcept>
#include <string>

namespace quakesense {

// Bad scenario/config input (exit code 1 at the CLI).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input document (feed, gazetteer, corpus, log).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed input that violates a domain invariant.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Classifier training diverged or was fed an unusable corpus.
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation was called with the wrong kind of argument
// (e.g. a damage model passed where a relevance model is required).
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// A metric whose preconditions do not hold on the given log.
struct MetricUndefined : std::runtime_error {
    explicit MetricUndefined(const std::string& msg) : std::runtime_error(msg) {}
};

// Question targeted at a user the world does not know.
struct DeliveryError : std::runtime_error {
    explicit DeliveryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Send plan cannot be built (e.g. no bots for a non-empty target list).
struct SchedulingError : std::runtime_error {
    explicit SchedulingError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace quakesense
