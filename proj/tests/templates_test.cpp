#include "doctest.h"

#include <string>
#include <vector>

#include "quakesense/rng.hpp"
#include "quakesense/templates.hpp"

using namespace quakesense;

TEST_CASE("slot_count reads the highest placeholder index") {
    CHECK(slot_count("no places here") == 0);
    CHECK(slot_count("felt it in {P1}") == 1);
    CHECK(slot_count("from {P1} to {P2}") == 2);
    CHECK(slot_count("{P2} only") == 2);
    CHECK(slot_count("{P1} {P2} {P3} {P4}") == 4);
}

TEST_CASE("render_template fills slots verbatim with zero noise") {
    Rng rng(1);
    const std::string out =
        render_template("felt it in {P1} near {P2}", {"Kathmandu", "Patan"}, 0.0, rng);
    CHECK(out == "felt it in Kathmandu near Patan");
}

TEST_CASE("render_template is deterministic for a fixed rng state") {
    Rng a(99);
    Rng b(99);
    const std::string t = "strong shaking reported around {P1}, stay safe everyone";
    CHECK(render_template(t, {"Lamjung"}, 0.5, a) == render_template(t, {"Lamjung"}, 0.5, b));
}

TEST_CASE("noise garbles filler tokens but never the filled place names") {
    const std::string t = "massive shaking something happening around {P1} right now";
    int changed = 0;
    for (int i = 0; i < 50; ++i) {
        Rng rng(1000 + i);
        const std::string out = render_template(t, {"Kokopo"}, 1.0, rng);
        CHECK(out.find("Kokopo") != std::string::npos);
        if (out != "massive shaking something happening around Kokopo right now") ++changed;
    }
    // noise 1.0 mutates every eligible token, so every render differs
    CHECK(changed == 50);
}

TEST_CASE("builtin groups are populated and labeled consistently") {
    const TemplateBank& bank = TemplateBank::builtin();

    for (auto arch : {Archetype::witness, Archetype::sympathizer, Archetype::keyword_noise,
                      Archetype::chatter}) {
        CHECK_FALSE(bank.group(arch).empty());
    }

    // the witness voice is entirely relevant text
    for (const auto& t : bank.group(Archetype::witness)) CHECK(t.relevant);
    // off-topic groups never carry a relevant label
    for (const auto& t : bank.group(Archetype::keyword_noise)) CHECK_FALSE(t.relevant);
    for (const auto& t : bank.group(Archetype::chatter)) CHECK_FALSE(t.relevant);
    // only relevant text may claim damage present
    for (auto arch : {Archetype::keyword_noise, Archetype::chatter}) {
        for (const auto& t : bank.group(arch)) CHECK(t.damage == DamageLabel::no_info);
    }
}

TEST_CASE("mean_slots is a weighted average within slot bounds") {
    const TemplateBank& bank = TemplateBank::builtin();
    for (auto arch : {Archetype::witness, Archetype::sympathizer}) {
        const double m = bank.mean_slots(arch);
        CHECK(m >= 0.0);
        CHECK(m <= 4.0);
    }
}

TEST_CASE("collaborative geo reply buckets hold exactly their slot count") {
    const TemplateBank& bank = TemplateBank::builtin();
    for (int slots = 1; slots <= 4; ++slots) {
        const auto& bucket = bank.geo_collab(slots);
        REQUIRE_FALSE(bucket.empty());
        for (const auto& t : bucket) CHECK(slot_count(t.text) == slots);
    }
}

TEST_CASE("non-collaborative reply templates carry no damage claim") {
    const TemplateBank& bank = TemplateBank::builtin();
    for (const auto& t : bank.geo_noncollab()) CHECK(t.damage == DamageLabel::no_info);
    for (const auto& t : bank.damage_noncollab()) CHECK(t.damage == DamageLabel::no_info);
    // the collaborative damage buckets are label-pure by construction
    for (const auto& t : bank.damage_collab_present()) CHECK(t.damage == DamageLabel::present);
    for (const auto& t : bank.damage_collab_absent())
        CHECK(t.damage == DamageLabel::absent_reported);
}

TEST_CASE("default question texts exist for both kinds") {
    const TemplateBank& bank = TemplateBank::builtin();
    CHECK_FALSE(bank.default_question_texts(QuestionKind::ask_damage).empty());
    CHECK_FALSE(bank.default_question_texts(QuestionKind::ask_geo).empty());
}
