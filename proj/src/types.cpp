#include "quakesense/types.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "quakesense/errors.hpp"

namespace quakesense {

using ordered_json = nlohmann::ordered_json;

std::string to_string(DamageLabel label) {
    switch (label) {
        case DamageLabel::present: return "present";
        case DamageLabel::absent_reported: return "absent_reported";
        case DamageLabel::no_info: return "no_info";
    }
    return "no_info";
}

DamageLabel damage_label_from_string(const std::string& s) {
    if (s == "present") return DamageLabel::present;
    if (s == "absent_reported") return DamageLabel::absent_reported;
    if (s == "no_info") return DamageLabel::no_info;
    throw ParseError("unknown damage label `" + s + "`");
}

std::string to_string(QuestionKind kind) {
    return kind == QuestionKind::ask_damage ? "ask_damage" : "ask_geo";
}

QuestionKind question_kind_from_string(const std::string& s) {
    if (s == "ask_damage") return QuestionKind::ask_damage;
    if (s == "ask_geo") return QuestionKind::ask_geo;
    throw ParseError("unknown question kind `" + s + "`");
}

std::string message_to_jsonl(const RawMessage& msg) {
    ordered_json row;
    row["msg_id"] = msg.msg_id;
    row["author_id"] = msg.author_id;
    row["ts"] = msg.timestamp_ms;
    row["text"] = msg.text;
    if (msg.geotag) {
        row["geo"] = ordered_json{{"lat", msg.geotag->lat}, {"lon", msg.geotag->lon}};
    } else {
        row["geo"] = nullptr;
    }
    if (msg.in_reply_to) {
        row["in_reply_to"] = *msg.in_reply_to;
    } else {
        row["in_reply_to"] = nullptr;
    }
    ordered_json truth;
    truth["relevant"] = msg.truth.relevant;
    truth["witness"] = msg.truth.witness;
    truth["damage"] = to_string(msg.truth.damage);
    truth["mentioned_place_ids"] = msg.truth.mentioned_place_ids;
    if (msg.truth.collaborative) {
        truth["collaborative"] = *msg.truth.collaborative;
    } else {
        truth["collaborative"] = nullptr;
    }
    row["truth"] = std::move(truth);
    return row.dump();
}

RawMessage message_from_jsonl(const std::string& line) {
    try {
        ordered_json row = ordered_json::parse(line);
        RawMessage msg;
        msg.msg_id = row.at("msg_id").get<std::string>();
        msg.author_id = row.at("author_id").get<std::string>();
        msg.timestamp_ms = row.at("ts").get<std::int64_t>();
        msg.text = row.at("text").get<std::string>();
        if (!row.at("geo").is_null()) {
            msg.geotag =
                LatLon{row["geo"].at("lat").get<double>(), row["geo"].at("lon").get<double>()};
            if (!valid_latlon(*msg.geotag)) {
                throw ValidationError("message " + msg.msg_id + ": geotag out of range");
            }
        }
        if (!row.at("in_reply_to").is_null()) {
            msg.in_reply_to = row["in_reply_to"].get<std::string>();
        }
        const auto& truth = row.at("truth");
        msg.truth.relevant = truth.at("relevant").get<bool>();
        msg.truth.witness = truth.at("witness").get<bool>();
        msg.truth.damage = damage_label_from_string(truth.at("damage").get<std::string>());
        msg.truth.mentioned_place_ids =
            truth.at("mentioned_place_ids").get<std::vector<std::string>>();
        if (!truth.at("collaborative").is_null()) {
            msg.truth.collaborative = truth["collaborative"].get<bool>();
        }
        return msg;
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("malformed message row: ") + e.what());
    }
}

void save_message_log(const std::string& path, const std::vector<RawMessage>& messages) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open `" + path + "` for writing");
    for (const auto& msg : messages) {
        out << message_to_jsonl(msg) << '\n';
    }
}

std::vector<RawMessage> load_message_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open message log `" + path + "`");
    std::vector<RawMessage> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            out.push_back(message_from_jsonl(line));
        } catch (const ParseError& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace quakesense
