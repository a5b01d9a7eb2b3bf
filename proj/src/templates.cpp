#include "quakesense/templates.hpp"

#include <algorithm>
#include <cctype>

#include "quakesense/errors.hpp"

namespace quakesense {

std::string to_string(Archetype a) {
    switch (a) {
        case Archetype::witness: return "witness";
        case Archetype::sympathizer: return "sympathizer";
        case Archetype::keyword_noise: return "keyword_noise";
        case Archetype::chatter: return "chatter";
    }
    return "chatter";
}

namespace {

constexpr auto P = DamageLabel::present;
constexpr auto A = DamageLabel::absent_reported;
constexpr auto N = DamageLabel::no_info;

// Texts that read the same whether or not a real quake is behind them; they
// sit in both the witness pool (relevant) and the off-topic pool (not), which
// keeps the relevance task from being perfectly separable.
std::vector<MessageTemplate> ambiguous_shake_templates(bool as_relevant, double weight) {
    return {
        {"everything on my shelf is rattling right now", as_relevant, N, weight},
        {"whoa the whole floor just moved", as_relevant, N, weight},
        {"did the building just sway or am i dizzy", as_relevant, N, weight},
        {"my lamp will not stop swinging", as_relevant, N, weight},
        {"the windows keep rattling over here", as_relevant, N, weight},
        {"ok that shaking felt way too real", as_relevant, N, weight},
        {"the glasses in the cabinet were clinking for a few seconds", as_relevant, N, weight},
        {"something just rumbled through the house", as_relevant, N, weight},
    };
}

std::vector<MessageTemplate> witness_templates() {
    return {
        {"the whole house was shaking, part of our wall in {P1} just collapsed", true, P, 1.0},
        {"earthquake here in {P1}, the ceiling cracked and my dishes are all over the floor", true, P, 1.0},
        {"strong quake hit {P1}, the old bridge is down and power lines snapped", true, P, 1.0},
        {"i just felt a big earthquake near {P1}, shop windows shattered on our street", true, P, 1.0},
        {"our chimney came down in the quake, {P1} got hit hard", true, P, 1.0},
        {"tremor smashed the tiles off my roof here in {P1}, i am still shaking", true, P, 1.0},
        {"aftershock again, more bricks falling near {P2} here in {P1}", true, P, 0.8},
        {"we felt a strong earthquake in {P1} but everyone is fine, no damage here", true, A, 1.0},
        {"big quake in {P1}, i checked the house, nothing broken luckily", true, A, 1.0},
        {"the earthquake woke us up in {P1}, all good though, no damage that i can see", true, A, 1.0},
        {"we felt it here in {P1}, the quake just rattled my windows, nothing fell", true, A, 1.0},
        {"earthquake in {P1} a minute ago, no damage around us, stay safe everyone", true, A, 1.0},
        {"whoa did anyone else feel that earthquake just now", true, N, 1.0},
        {"the ground was shaking for a good ten seconds, that was a quake right", true, N, 1.0},
        {"earthquake!! i can still feel the floor moving a little", true, N, 1.0},
        {"felt a tremor here in {P1}, does anyone know the magnitude", true, N, 1.0},
        {"that earthquake scared my dog, my heart is racing", true, N, 1.0},
        {"we ran outside when the quake started, everyone on my street did", true, N, 0.9},
        // deliberately ambiguous: shares phrasing with off-topic templates
        {"that was not a truck, that was an earthquake right", true, N, 0.5},
        {"either my washing machine or a quake, the floor moved for a second", true, N, 0.5},
        {"small tremor maybe, the lamp over my desk swayed a little", true, N, 0.5},
    };
}

std::vector<MessageTemplate> sympathizer_templates() {
    return {
        {"praying for everyone in {P1} after the earthquake", true, N, 1.0},
        {"news says a strong earthquake hit near {P1}, hope people are ok", true, N, 1.0},
        {"my family in {P1} says they felt the quake, waiting to hear more", true, N, 1.0},
        {"that earthquake magnitude looks serious, thoughts with {P1} tonight", true, N, 1.0},
        {"did the quake reach {P2}? friends in {P1} are not answering", true, N, 0.9},
        {"watching earthquake coverage from {P1}, stay safe out there", true, N, 1.0},
        {"a tremor near {P1} is trending, checking on my cousins", true, N, 0.9},
        {"tv is showing collapsed buildings in {P1} after the earthquake, terrible", true, P, 0.7},
        {"reports of damaged roads near {P1}, that quake was strong", true, P, 0.7},
        {"photos from {P1} show cracked walls everywhere after the tremor", true, P, 0.6},
        {"talked to my cousin in {P1}, the quake felt strong but no damage there", true, A, 0.7},
    };
}

std::vector<MessageTemplate> keyword_noise_templates() {
    return {
        {"huge earthquake sale at the furniture store this weekend, everything half off", false, N, 1.0},
        {"that bass drop was an earthquake, best concert of my life", false, N, 1.0},
        {"my toddler is a walking earthquake, toys everywhere again", false, N, 1.0},
        {"reading about the 1906 earthquake for history class tomorrow", false, N, 1.0},
        {"earthquake drill at school today, we hid under the desks", false, N, 1.0},
        {"quake 3 arena is still the best shooter ever made, fight me", false, N, 1.0},
        {"new quake movie trailer looks awesome, opening night for sure", false, N, 1.0},
        {"this espresso has my hands doing a little tremor, need to slow down", false, N, 1.0},
        {"aftershock energy drink is actually decent, tried it at the gym", false, N, 0.9},
        {"the crowd was a quake of emotions at the finale last night", false, N, 0.9},
        {"leg day left me with a tremor in both knees, worth it", false, N, 0.9},
        {"their new album is an earthquake, track three especially", false, N, 0.9},
        // deliberately ambiguous: shares phrasing with witness templates
        {"felt like an earthquake when the neighbors upstairs started dancing", false, N, 0.5},
        {"thought it was an earthquake but it was just the train passing by", false, N, 0.5},
        {"my desk was shaking from the construction outside, not a quake", false, N, 0.5},
        {"the crowd jumping felt like a proper earthquake in that stadium", false, N, 0.5},
    };
}

std::vector<MessageTemplate> chatter_templates() {
    return {
        {"anyone want to grab coffee later this afternoon", false, N, 1.0},
        {"traffic on the highway is brutal this morning", false, N, 1.0},
        {"new album drops friday and i cannot wait", false, N, 1.0},
        {"looking for a good pizza place around here, any tips", false, N, 1.0},
        {"my cat knocked the plant over again, third time this week", false, N, 1.0},
        {"finally finished that book everyone keeps recommending", false, N, 1.0},
        {"rain again, the garden is happy at least", false, N, 1.0},
        {"does anyone know a reliable bike repair shop nearby", false, N, 1.0},
    };
}

}  // namespace

TemplateBank::TemplateBank() {
    witness_ = witness_templates();
    sympathizer_ = sympathizer_templates();
    keyword_noise_ = keyword_noise_templates();
    chatter_ = chatter_templates();
    for (MessageTemplate t : ambiguous_shake_templates(true, 0.35)) witness_.push_back(t);
    for (MessageTemplate t : ambiguous_shake_templates(false, 0.50)) keyword_noise_.push_back(t);

    damage_collab_present_ = {
        {"yes, we have damage here, a wall fell at {P1}", P, 1.0},
        {"there are cracks in the school building in {P1}, everyone is outside", P, 1.0},
        {"some old houses near {P1} partly collapsed, no injuries that i know of", P, 1.0},
        {"the quake knocked bricks off the shop fronts around {P1}", P, 1.0},
        {"power lines are down on our street in {P1}, one roof caved in", P, 1.0},
        {"yes, broken windows and fallen shelves here, i am near {P1} close to {P2}", P, 0.8},
        {"damage yes, the bridge by {P1} is cracked, cars are turning back", P, 1.0},
    };
    damage_collab_absent_ = {
        {"we are safe, no damage around {P1}", A, 1.0},
        {"nothing broken here in {P1}, just a big scare", A, 1.0},
        {"all fine, i checked the whole block, no damage", A, 1.0},
        {"no damage that i can see, the shelves rattled only", A, 1.0},
        {"house is fine, neighbors fine too, nothing fell in {P1}", A, 1.0},
    };
    damage_noncollab_ = {
        {"who is this", N, 1.0},
        {"why do you want to know that", N, 1.0},
        {"please stop messaging me", N, 1.0},
        {"i do not answer bots", N, 1.0},
        {"???", N, 0.6},
    };

    geo_collab_by_slots_[1] = {
        {"i am in {P1} right now", N, 1.0},
        {"currently at {P1}", N, 1.0},
        {"we are staying in {P1}", N, 1.0},
    };
    geo_collab_by_slots_[2] = {
        {"i am in {P1}, close to {P2}", N, 1.0},
        {"near {P1}, just past {P2}", N, 1.0},
        {"we are by {P1}, not far from {P2}", N, 1.0},
        {"i am in {P1}, lots of rubble near {P2}", P, 0.35},
    };
    geo_collab_by_slots_[3] = {
        {"staying in {P1}, between {P2} and {P3}", N, 1.0},
        {"right now in {P1}, we drove from {P2} through {P3}", N, 1.0},
    };
    geo_collab_by_slots_[4] = {
        {"{P1}, near {P2}, not far from {P3} and {P4}", N, 1.0},
        {"we are in {P1} by {P2}, heading toward {P3} past {P4}", N, 1.0},
    };
    geo_noncollab_ = {
        {"i would rather not say", N, 1.0},
        {"not sharing my location online, sorry", N, 1.0},
        {"no", N, 0.6},
        {"why do you need that", N, 1.0},
        {"ask someone else please", N, 1.0},
    };

    ask_damage_texts_ = {
        "hi, emergency monitoring here. are you ok? did you notice any damage to buildings or people around you?",
        "we saw your post about the earthquake. is there visible damage where you are?",
    };
    ask_geo_texts_ = {
        "hi, emergency monitoring here. can you tell us where you are right now? a place name helps.",
        "we saw your post about the earthquake. which town or area are you in?",
    };
}

const TemplateBank& TemplateBank::builtin() {
    static const TemplateBank bank;
    return bank;
}

const std::vector<MessageTemplate>& TemplateBank::group(Archetype a) const {
    switch (a) {
        case Archetype::witness: return witness_;
        case Archetype::sympathizer: return sympathizer_;
        case Archetype::keyword_noise: return keyword_noise_;
        case Archetype::chatter: return chatter_;
    }
    return chatter_;
}

double TemplateBank::mean_slots(Archetype a) const {
    const auto& group_templates = group(a);
    double total_weight = 0.0, total_slots = 0.0;
    for (const auto& t : group_templates) {
        total_weight += t.weight;
        total_slots += t.weight * slot_count(t.text);
    }
    return total_weight > 0.0 ? total_slots / total_weight : 0.0;
}

const std::vector<ReplyTemplate>& TemplateBank::geo_collab(int slots) const {
    if (slots < 1 || slots > 4) throw UsageError("geo reply slot count must be in [1,4]");
    return geo_collab_by_slots_[static_cast<std::size_t>(slots)];
}

const std::vector<std::string>& TemplateBank::default_question_texts(QuestionKind kind) const {
    return kind == QuestionKind::ask_damage ? ask_damage_texts_ : ask_geo_texts_;
}

int slot_count(const std::string& tmpl) {
    int highest = 0;
    for (int k = 1; k <= 4; ++k) {
        std::string marker = "{P" + std::to_string(k) + "}";
        if (tmpl.find(marker) != std::string::npos) highest = k;
    }
    return highest;
}

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

// One in-place token mutation; the choice of operation and position comes
// from rng so renders are reproducible.
std::string mutate_token(const std::string& token, Rng& rng) {
    if (token.size() < 2) return token;
    std::string out = token;
    const auto pos = static_cast<std::size_t>(rng.below(out.size()));
    switch (rng.below(3)) {
        case 0:
            out.erase(pos, 1);
            break;
        case 1:
            out.insert(pos, 1, out[pos]);
            break;
        default:
            out[pos] = static_cast<char>('a' + rng.below(26));
            break;
    }
    return out;
}

}  // namespace

std::string render_template(const std::string& tmpl, const std::vector<std::string>& names,
                            double noise, Rng& rng) {
    const int slots = slot_count(tmpl);
    if (static_cast<int>(names.size()) < slots) {
        throw UsageError("template needs " + std::to_string(slots) + " place names, got " +
                         std::to_string(names.size()));
    }
    std::string filled;
    filled.reserve(tmpl.size() + 32);
    std::vector<std::pair<std::size_t, std::size_t>> protected_spans;
    for (std::size_t i = 0; i < tmpl.size();) {
        bool matched = false;
        if (tmpl[i] == '{' && i + 3 < tmpl.size() && tmpl[i + 1] == 'P' && tmpl[i + 3] == '}') {
            const char digit = tmpl[i + 2];
            if (digit >= '1' && digit <= '4') {
                const auto& name = names[static_cast<std::size_t>(digit - '1')];
                protected_spans.emplace_back(filled.size(), filled.size() + name.size());
                filled += name;
                i += 4;
                matched = true;
            }
        }
        if (!matched) {
            filled += tmpl[i];
            ++i;
        }
    }

    std::string out;
    out.reserve(filled.size() + 8);
    std::size_t i = 0;
    auto inside_protected = [&](std::size_t begin, std::size_t end) {
        for (const auto& span : protected_spans) {
            if (begin < span.second && span.first < end) return true;
        }
        return false;
    };
    while (i < filled.size()) {
        if (!is_word_char(static_cast<unsigned char>(filled[i]))) {
            out += filled[i];
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < filled.size() && is_word_char(static_cast<unsigned char>(filled[j]))) ++j;
        std::string token = filled.substr(i, j - i);
        if (token.size() >= 3 && !inside_protected(i, j) && rng.bernoulli(noise)) {
            token = mutate_token(token, rng);
        }
        out += token;
        i = j;
    }
    return out;
}

}  // namespace quakesense
