#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "quakesense/rng.hpp"
#include "quakesense/types.hpp"

namespace quakesense {

// Voice groups for spontaneous posts. `witness` and `sympathizer` produce
// relevant text; `keyword_noise` is off-topic text that still trips the
// collection keywords; `chatter` never matches them.
enum class Archetype { witness, sympathizer, keyword_noise, chatter };

std::string to_string(Archetype a);

// Place slots are written {P1}..{P4}. A template's labels are exact: whatever
// the generator renders from it inherits them verbatim.
struct MessageTemplate {
    std::string text;
    bool relevant = false;
    DamageLabel damage = DamageLabel::no_info;
    double weight = 1.0;
};

struct ReplyTemplate {
    std::string text;
    DamageLabel damage = DamageLabel::no_info;
    double weight = 1.0;
};

class TemplateBank {
public:
    static const TemplateBank& builtin();

    const std::vector<MessageTemplate>& group(Archetype a) const;
    // Weighted mean number of place slots across a group.
    double mean_slots(Archetype a) const;

    // Solicited-reply templates. Collaborative geo replies are additionally
    // bucketed by slot count so the generator can steer place density.
    const std::vector<ReplyTemplate>& damage_collab_present() const { return damage_collab_present_; }
    const std::vector<ReplyTemplate>& damage_collab_absent() const { return damage_collab_absent_; }
    const std::vector<ReplyTemplate>& damage_noncollab() const { return damage_noncollab_; }
    const std::vector<ReplyTemplate>& geo_collab(int slots) const;  // slots in [1,4]
    const std::vector<ReplyTemplate>& geo_noncollab() const { return geo_noncollab_; }

    const std::vector<std::string>& default_question_texts(QuestionKind kind) const;

private:
    TemplateBank();

    std::vector<MessageTemplate> witness_, sympathizer_, keyword_noise_, chatter_;
    std::vector<ReplyTemplate> damage_collab_present_, damage_collab_absent_, damage_noncollab_;
    std::array<std::vector<ReplyTemplate>, 5> geo_collab_by_slots_;
    std::vector<ReplyTemplate> geo_noncollab_;
    std::vector<std::string> ask_damage_texts_, ask_geo_texts_;
};

// Number of place slots a template consumes ({P1}..{P4}; highest index wins).
int slot_count(const std::string& tmpl);

// Fills {Pk} slots with names[k-1], then garbles tokens outside the filled
// names: each alphanumeric run of length >= 3 is independently mutated with
// probability `noise` (drop, double, or replace one character). Draws come
// from `rng` in left-to-right token order.
std::string render_template(const std::string& tmpl, const std::vector<std::string>& names,
                            double noise, Rng& rng);

}  // namespace quakesense
