#include "quakesense/geoparse.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "quakesense/errors.hpp"

namespace quakesense {

std::string to_string(Granularity g) {
    switch (g) {
        case Granularity::building: return "building";
        case Granularity::city: return "city";
        case Granularity::region: return "region";
        case Granularity::country: return "country";
        case Granularity::other: return "other";
    }
    return "other";
}

Granularity granularity_from_string(const std::string& s) {
    if (s == "building") return Granularity::building;
    if (s == "city") return Granularity::city;
    if (s == "region") return Granularity::region;
    if (s == "country") return Granularity::country;
    return Granularity::other;
}

std::vector<TextToken> tokenize_with_offsets(const std::string& text) {
    std::vector<TextToken> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!std::isalnum(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        TextToken tok;
        tok.begin = i;
        while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) {
            tok.lowered.push_back(char(std::tolower(static_cast<unsigned char>(text[i]))));
            ++i;
        }
        tok.end = i;
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::vector<std::string> pattern_tokens(const std::string& name) {
    std::vector<std::string> out;
    for (auto& t : tokenize_with_offsets(name)) out.push_back(std::move(t.lowered));
    return out;
}

}  // namespace

Gazetteer Gazetteer::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read gazetteer file `" + path + "`");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_tsv(ss.str(), path);
}

Gazetteer Gazetteer::from_tsv(const std::string& text, const std::string& origin) {
    std::vector<GazetteerEntry> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        const auto fields = split(line, '\t');
        if (fields.size() != 8)
            throw ParseError(where + ": expected 8 tab-separated fields, got " +
                             std::to_string(fields.size()));
        GazetteerEntry e;
        e.place_id = fields[0];
        e.name = fields[1];
        if (!fields[2].empty()) {
            for (auto& alias : split(fields[2], '|'))
                if (!alias.empty()) e.aliases.push_back(alias);
        }
        try {
            e.position.lat = std::stod(fields[3]);
            e.position.lon = std::stod(fields[4]);
            e.population = std::stoll(fields[6]);
        } catch (const std::exception&) {
            throw ParseError(where + ": numeric field is not a number");
        }
        e.granularity = granularity_from_string(fields[5]);
        e.admin_parent = fields[7];
        if (e.place_id.empty()) throw ValidationError(where + ": empty place_id");
        if (e.name.empty()) throw ValidationError(where + ": empty name");
        if (!valid_latlon(e.position))
            throw ValidationError(where + ": coordinates out of range");
        if (e.population < 0) throw ValidationError(where + ": negative population");
        if (pattern_tokens(e.name).empty())
            throw ValidationError(where + ": name `" + e.name + "` has no matchable tokens");
        entries.push_back(std::move(e));
    }
    return from_entries(std::move(entries));
}

Gazetteer Gazetteer::from_entries(std::vector<GazetteerEntry> entries) {
    Gazetteer g;
    g.entries_ = std::move(entries);
    for (std::size_t i = 0; i < g.entries_.size(); ++i) {
        if (!g.by_id_.emplace(g.entries_[i].place_id, i).second)
            throw ValidationError("duplicate place_id `" + g.entries_[i].place_id + "`");
    }
    g.validate();
    return g;
}

void Gazetteer::validate() {
    for (const auto& e : entries_) {
        if (e.admin_parent.empty()) continue;
        const auto it = by_id_.find(e.admin_parent);
        if (it == by_id_.end())
            throw ValidationError("entry `" + e.place_id + "` references unknown parent `" +
                                  e.admin_parent + "`");
        const auto& parent = entries_[it->second];
        // The chain must coarsen: a city sits under a region or country, and
        // so on. `other` entries (mountains, lakes) may attach to a region or
        // country even though their own level ranks coarsest.
        if (e.granularity == Granularity::other) {
            if (parent.granularity != Granularity::region &&
                parent.granularity != Granularity::country)
                throw ValidationError("entry `" + e.place_id +
                                      "`: `other` places may only attach to a region or country");
        } else if (granularity_rank(parent.granularity) <= granularity_rank(e.granularity) ||
                   parent.granularity == Granularity::other) {
            throw ValidationError("entry `" + e.place_id + "` (" + to_string(e.granularity) +
                                  ") has non-coarsening parent `" + e.admin_parent + "` (" +
                                  to_string(parent.granularity) + ")");
        }
    }
    // Acyclicity: walk each chain; depth can never exceed the entry count.
    for (const auto& e : entries_) {
        std::size_t steps = 0;
        const GazetteerEntry* cur = &e;
        while (!cur->admin_parent.empty()) {
            if (++steps > entries_.size())
                throw ValidationError("cyclic admin_parent chain at `" + e.place_id + "`");
            cur = &entries_[by_id_.at(cur->admin_parent)];
        }
    }
}

const GazetteerEntry* Gazetteer::find(const std::string& place_id) const {
    const auto it = by_id_.find(place_id);
    return it == by_id_.end() ? nullptr : &entries_[it->second];
}

Granularity Gazetteer::granularity_of(const std::string& place_id) const {
    const auto* e = find(place_id);
    if (!e) throw ValidationError("unknown place_id `" + place_id + "`");
    return e->granularity;
}

std::vector<std::string> Gazetteer::parent_chain(const std::string& place_id) const {
    const auto* e = find(place_id);
    if (!e) throw ValidationError("unknown place_id `" + place_id + "`");
    std::vector<std::string> chain;
    while (e) {
        chain.push_back(e->place_id);
        e = e->admin_parent.empty() ? nullptr : find(e->admin_parent);
    }
    return chain;
}

bool prefer_entry(const GazetteerEntry& a, const GazetteerEntry& b,
                  const std::optional<LatLon>& epicenter) {
    if (epicenter) {
        const double da = haversine_km(a.position, *epicenter);
        const double db = haversine_km(b.position, *epicenter);
        if (da != db) return da < db;
    }
    if (a.population != b.population) return a.population > b.population;
    if (a.granularity != b.granularity)
        return granularity_rank(a.granularity) < granularity_rank(b.granularity);
    return a.place_id < b.place_id;
}

Geoparser::Geoparser(const Gazetteer& gazetteer) : gazetteer_(&gazetteer) {
    nodes_.emplace_back();  // root
    const auto& entries = gazetteer.entries();
    for (std::size_t ei = 0; ei < entries.size(); ++ei) {
        std::vector<std::vector<std::string>> patterns;
        patterns.push_back(pattern_tokens(entries[ei].name));
        for (const auto& alias : entries[ei].aliases) {
            auto toks = pattern_tokens(alias);
            if (!toks.empty()) patterns.push_back(std::move(toks));
        }
        for (const auto& pattern : patterns) {
            std::size_t node = 0;
            for (const auto& tok : pattern) {
                auto [it, inserted] = nodes_[node].children.try_emplace(tok, nodes_.size());
                if (inserted) nodes_.emplace_back();
                node = it->second;
            }
            nodes_[node].entry_indices.push_back(ei);
        }
    }
}

std::vector<PlaceTag> Geoparser::parse(const std::string& text,
                                       std::optional<LatLon> epicenter) const {
    const auto tokens = tokenize_with_offsets(text);
    const auto& entries = gazetteer_->entries();
    std::vector<PlaceTag> tags;

    std::size_t i = 0;
    while (i < tokens.size()) {
        // deepest trie node reachable from token i = longest match at i
        std::size_t node = 0;
        std::size_t best_len = 0;
        const std::vector<std::size_t>* best_entries = nullptr;
        for (std::size_t j = i; j < tokens.size(); ++j) {
            const auto it = nodes_[node].children.find(tokens[j].lowered);
            if (it == nodes_[node].children.end()) break;
            node = it->second;
            if (!nodes_[node].entry_indices.empty()) {
                best_len = j - i + 1;
                best_entries = &nodes_[node].entry_indices;
            }
        }
        if (best_entries == nullptr) {
            ++i;
            continue;
        }
        std::size_t best = (*best_entries)[0];
        for (std::size_t k = 1; k < best_entries->size(); ++k) {
            const std::size_t cand = (*best_entries)[k];
            if (prefer_entry(entries[cand], entries[best], epicenter)) best = cand;
        }
        PlaceTag tag;
        tag.begin = tokens[i].begin;
        tag.end = tokens[i + best_len - 1].end;
        tag.surface = text.substr(tag.begin, tag.end - tag.begin);
        tag.place_id = entries[best].place_id;
        tag.position = entries[best].position;
        tag.granularity = entries[best].granularity;
        tags.push_back(std::move(tag));
        i += best_len;
    }
    return tags;
}

}  // namespace quakesense
