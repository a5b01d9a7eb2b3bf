#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quakesense/classify.hpp"
#include "quakesense/geoparse.hpp"

namespace quakesense {

// Everything named "bundled" is generated, not loaded: the same (size, seed)
// pair always yields the same fixture, so the data files under data/ can be
// regenerated at will and commands that need the bundled gazetteer work
// without a path argument.
inline constexpr std::uint64_t kBundledGazetteerSeed = 73;
inline constexpr std::size_t kBundledGazetteerSize = 5000;
inline constexpr std::uint64_t kRelevanceCorpusSeed = 101;
inline constexpr std::uint64_t kDamageCorpusSeed = 202;
inline constexpr std::size_t kBundledCorpusSize = 4000;

// World gazetteer: hand-written anchor places around the five scenario
// epicenters (plus deliberately duplicated names for disambiguation tests),
// padded with generated clusters up to `count` entries. Parents always
// precede children, so any prefix is itself a valid gazetteer.
std::vector<GazetteerEntry> synthetic_gazetteer_entries(std::size_t count, std::uint64_t seed);

std::string gazetteer_to_tsv(const std::vector<GazetteerEntry>& entries);

// The full-size gazetteer, built once per process.
const Gazetteer& bundled_gazetteer();

// Labeled corpora rendered from the message template bank with place names
// drawn from the gazetteer. Texts are noisy; labels are exact.
std::vector<LabeledExample> synthetic_relevance_corpus(const Gazetteer& gazetteer,
                                                       std::size_t count, std::uint64_t seed);

// Shared damage text stream; the task argument selects which binary label the
// corpus carries (damage_presence or damage_info).
std::vector<LabeledExample> synthetic_damage_corpus(const Gazetteer& gazetteer, std::size_t count,
                                                    std::uint64_t seed, ClassifyTask task);

}  // namespace quakesense
