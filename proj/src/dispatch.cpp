#include "quakesense/dispatch.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "quakesense/errors.hpp"
#include "quakesense/templates.hpp"

namespace quakesense {

using ordered_json = nlohmann::ordered_json;

std::int64_t Bot::next_available(std::int64_t now) const {
    if (limit.max_sends <= 0) throw ConfigError("bot " + bot_id + ": max_sends must be positive");
    if (limit.window_ms <= 0) throw ConfigError("bot " + bot_id + ": window must be positive");
    if (send_history.size() < static_cast<std::size_t>(limit.max_sends)) return now;
    // the max_sends-th most recent send leaves the window first
    const std::int64_t gate =
        send_history[send_history.size() - static_cast<std::size_t>(limit.max_sends)] +
        limit.window_ms;
    return std::max(now, gate);
}

void Bot::note_send(std::int64_t when) {
    if (!send_history.empty() && when < send_history.back()) {
        throw SchedulingError("bot " + bot_id + ": send times must be non-decreasing");
    }
    send_history.push_back(when);
}

QuestionTemplates QuestionTemplates::defaults() {
    const auto& bank = TemplateBank::builtin();
    QuestionTemplates t;
    t.ask_damage = bank.default_question_texts(QuestionKind::ask_damage);
    t.ask_geo = bank.default_question_texts(QuestionKind::ask_geo);
    return t;
}

const std::string& QuestionTemplates::pick(QuestionKind kind, std::size_t send_index) const {
    const auto& pool = kind == QuestionKind::ask_damage ? ask_damage : ask_geo;
    if (pool.empty()) {
        throw ConfigError("no question template configured for " + to_string(kind));
    }
    return pool[send_index % pool.size()];
}

bool ContactLedger::contains(const std::string& user_id) const {
    return contacted_.count(user_id) > 0;
}

bool ContactLedger::add(const std::string& user_id, std::int64_t when) {
    return contacted_.emplace(user_id, when).second;
}

ContactLedger ContactLedger::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open ledger file `" + path + "`");
    ContactLedger ledger;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected `user_id<TAB>timestamp`");
        }
        try {
            ledger.contacted_[line.substr(0, tab)] = std::stoll(line.substr(tab + 1));
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": bad timestamp");
        }
    }
    return ledger;
}

void ContactLedger::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open `" + path + "` for writing");
    for (const auto& [user_id, when] : contacted_) {
        out << user_id << '\t' << when << '\n';
    }
}

void ContactLedger::append_to(const std::string& path, const std::string& user_id,
                              std::int64_t when) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw ParseError("cannot open `" + path + "` for appending");
    out << user_id << '\t' << when << '\n';
    out.flush();
}

std::vector<PlannedSend> schedule(const std::vector<ContactTarget>& targets,
                                  std::vector<Bot> bots, std::int64_t now,
                                  const QuestionTemplates& templates) {
    if (targets.empty()) return {};
    if (bots.empty()) throw SchedulingError("no bots available for a non-empty target list");

    std::vector<PlannedSend> plan;
    plan.reserve(targets.size());
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        std::size_t best = 0;
        std::int64_t best_time = std::numeric_limits<std::int64_t>::max();
        for (std::size_t off = 0; off < bots.size(); ++off) {
            const std::size_t j = (cursor + off) % bots.size();
            const std::int64_t t = bots[j].next_available(now);
            if (t < best_time) {
                best_time = t;
                best = j;
            }
        }
        bots[best].note_send(best_time);
        cursor = best + 1;

        Question q;
        q.question_id = "q-" + targets[i].user_id;  // unique: one contact per user ever
        q.bot_id = bots[best].bot_id;
        q.target_user = targets[i].user_id;
        q.kind = targets[i].question_kind;
        q.text = templates.pick(q.kind, i);
        q.sent_time = best_time;
        plan.push_back({std::move(q), best_time});
    }
    return plan;
}

SendOutcome send(const std::vector<PlannedSend>& plan, World& world, ContactLedger& ledger,
                 const SendOptions& opts) {
    SendOutcome outcome;
    outcome.log.reserve(plan.size());
    for (const auto& planned : plan) {
        DispatchLogEntry entry;
        entry.question_id = planned.question.question_id;
        entry.bot_id = planned.question.bot_id;
        entry.target = planned.question.target_user;
        entry.kind = planned.question.kind;
        entry.sent_time = planned.planned_time;
        if (ledger.contains(planned.question.target_user)) {
            entry.status = "duplicate-contact-suppressed";
        } else if (planned.planned_time > opts.staleness_deadline_ms) {
            entry.status = "expired";
        } else {
            auto reply = world.deliver_question(planned.question);
            ledger.add(planned.question.target_user, planned.planned_time);
            entry.status = "sent";
            outcome.sent.push_back(planned.question);
            if (reply) outcome.scheduled_replies.push_back(std::move(*reply));
        }
        outcome.log.push_back(std::move(entry));
    }
    return outcome;
}

ReplyCollection collect_replies(World& world, std::int64_t horizon_ms,
                                const std::vector<Question>& questions) {
    std::unordered_map<std::string, const Question*> by_id;
    by_id.reserve(questions.size());
    for (const auto& q : questions) by_id.emplace(q.question_id, &q);

    ReplyCollection out;
    for (auto& scheduled : world.collect_pending(horizon_ms)) {
        const auto it = by_id.find(scheduled.question_id);
        if (it == by_id.end()) {
            ++out.orphan_count;
            continue;
        }
        Reply reply;
        reply.msg_id = scheduled.message.msg_id;
        reply.question_id = scheduled.question_id;
        reply.delta_t_min = scheduled.delta_t_min;
        reply.kind = scheduled.kind;
        reply.collaborative = scheduled.message.truth.collaborative.value_or(false);
        reply.message = std::move(scheduled.message);
        out.replies.push_back(std::move(reply));
    }
    out.late_count = world.pending_count();
    return out;
}

void save_dispatch_log(const std::string& path, const std::vector<DispatchLogEntry>& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open `" + path + "` for writing");
    for (const auto& entry : log) {
        ordered_json row;
        row["question_id"] = entry.question_id;
        row["bot_id"] = entry.bot_id;
        row["target"] = entry.target;
        row["kind"] = to_string(entry.kind);
        row["sent_time"] = entry.sent_time;
        row["status"] = entry.status;
        out << row.dump() << '\n';
    }
}

std::vector<DispatchLogEntry> load_dispatch_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open dispatch log `" + path + "`");
    std::vector<DispatchLogEntry> log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            const ordered_json row = ordered_json::parse(line);
            DispatchLogEntry entry;
            entry.question_id = row.at("question_id").get<std::string>();
            entry.bot_id = row.at("bot_id").get<std::string>();
            entry.target = row.at("target").get<std::string>();
            entry.kind = question_kind_from_string(row.at("kind").get<std::string>());
            entry.sent_time = row.at("sent_time").get<std::int64_t>();
            entry.status = row.at("status").get<std::string>();
            log.push_back(std::move(entry));
        } catch (const ordered_json::exception& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return log;
}

}  // namespace quakesense
