#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quakesense/geo.hpp"

namespace quakesense {

enum class DamageLabel { present, absent_reported, no_info };

std::string to_string(DamageLabel label);
DamageLabel damage_label_from_string(const std::string& s);

enum class QuestionKind { ask_damage, ask_geo };

std::string to_string(QuestionKind kind);
QuestionKind question_kind_from_string(const std::string& s);

// Hidden labels attached to every simulated message; the pipeline never reads
// them, evaluation does.
struct GroundTruth {
    bool relevant = false;
    bool witness = false;
    DamageLabel damage = DamageLabel::no_info;
    std::vector<std::string> mentioned_place_ids;
    std::optional<bool> collaborative;  // replies only

    bool operator==(const GroundTruth&) const = default;
};

struct RawMessage {
    std::string msg_id;
    std::string author_id;
    std::int64_t timestamp_ms = 0;
    std::string text;
    std::optional<LatLon> geotag;
    std::optional<std::string> in_reply_to;  // question msg_id for replies
    GroundTruth truth;

    bool operator==(const RawMessage&) const = default;
};

// JSON Lines schema: msg_id, author_id, ts, text, geo|null, in_reply_to|null,
// truth{relevant, witness, damage, mentioned_place_ids, collaborative|null}.
std::string message_to_jsonl(const RawMessage& msg);
RawMessage message_from_jsonl(const std::string& line);

void save_message_log(const std::string& path, const std::vector<RawMessage>& messages);
std::vector<RawMessage> load_message_log(const std::string& path);

}  // namespace quakesense
