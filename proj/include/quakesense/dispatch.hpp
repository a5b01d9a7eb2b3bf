#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "quakesense/types.hpp"
#include "quakesense/witness.hpp"
#include "quakesense/world.hpp"

namespace quakesense {

struct BotLimit {
    int max_sends = 1;
    std::int64_t window_ms = 1;
};

struct Bot {
    std::string bot_id;
    BotLimit limit;
    std::vector<std::int64_t> send_history;  // non-decreasing send times

    // Earliest time >= now at which this bot may send without exceeding
    // max_sends in any sliding window of window_ms (half-open: a send exactly
    // window_ms after an old one is allowed).
    std::int64_t next_available(std::int64_t now) const;
    void note_send(std::int64_t when);
};

struct Question {
    std::string question_id;  // doubles as the question's msg_id in the world
    std::string bot_id;
    std::string target_user;
    QuestionKind kind = QuestionKind::ask_geo;
    std::string text;
    std::int64_t sent_time = 0;
};

struct PlannedSend {
    Question question;
    std::int64_t planned_time = 0;
};

struct Reply {
    std::string msg_id;
    std::string question_id;
    double delta_t_min = 0.0;
    QuestionKind kind = QuestionKind::ask_geo;
    bool collaborative = false;
    RawMessage message;
};

// Rendered question text per kind; sends rotate through the variants.
struct QuestionTemplates {
    std::vector<std::string> ask_damage;
    std::vector<std::string> ask_geo;

    static QuestionTemplates defaults();
    const std::string& pick(QuestionKind kind, std::size_t send_index) const;
};

// Append-only record of every user ever contacted.
class ContactLedger {
public:
    bool contains(const std::string& user_id) const;
    // Returns false (and changes nothing) if the user was already contacted.
    bool add(const std::string& user_id, std::int64_t when);
    std::size_t size() const { return contacted_.size(); }
    const std::map<std::string, std::int64_t>& entries() const { return contacted_; }

    // File format: one "user_id \t epoch_ms" line per contact.
    static ContactLedger load(const std::string& path);
    void save(const std::string& path) const;
    void append_to(const std::string& path, const std::string& user_id, std::int64_t when);

private:
    std::map<std::string, std::int64_t> contacted_;
};

// Assigns every target to the earliest-available bot (ties rotate round-robin)
// and stamps the question text and send time. Targets are never dropped here;
// they only get later times. Throws SchedulingError when there are targets but
// no bots.
std::vector<PlannedSend> schedule(const std::vector<ContactTarget>& targets,
                                  std::vector<Bot> bots, std::int64_t now,
                                  const QuestionTemplates& templates = QuestionTemplates::defaults());

struct DispatchLogEntry {
    std::string question_id;
    std::string bot_id;
    std::string target;
    QuestionKind kind = QuestionKind::ask_geo;
    std::int64_t sent_time = 0;
    std::string status;  // sent | duplicate-contact-suppressed | expired

    bool operator==(const DispatchLogEntry&) const = default;
};

struct SendOptions {
    // Planned sends after this instant expire instead of being sent.
    std::int64_t staleness_deadline_ms = std::numeric_limits<std::int64_t>::max();
};

struct SendOutcome {
    std::vector<DispatchLogEntry> log;
    std::vector<Question> sent;
    std::vector<ScheduledReply> scheduled_replies;
};

// Executes a plan against the world: skips users already in the ledger
// (status duplicate-contact-suppressed), expires sends past the staleness
// deadline, delivers the rest and records them in the ledger.
SendOutcome send(const std::vector<PlannedSend>& plan, World& world, ContactLedger& ledger,
                 const SendOptions& opts = {});

struct ReplyCollection {
    std::vector<Reply> replies;
    std::size_t late_count = 0;    // scheduled but past the horizon
    std::size_t orphan_count = 0;  // no matching question; excluded
};

// Drains the world's scheduled replies up to the horizon and correlates each
// with its question. delta_t is the reply latency in minutes, always > 0.
ReplyCollection collect_replies(World& world, std::int64_t horizon_ms,
                                const std::vector<Question>& questions);

// JSON Lines: {question_id, bot_id, target, kind, sent_time, status}.
void save_dispatch_log(const std::string& path, const std::vector<DispatchLogEntry>& log);
std::vector<DispatchLogEntry> load_dispatch_log(const std::string& path);

}  // namespace quakesense
