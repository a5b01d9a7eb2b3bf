#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quakesense/geo.hpp"

namespace quakesense {

// Ordered finest to coarsest; `other` is the least informative level.
enum class Granularity { building = 0, city = 1, region = 2, country = 3, other = 4 };

std::string to_string(Granularity g);
// Unrecognized stored levels normalize to `other`.
Granularity granularity_from_string(const std::string& s);
inline int granularity_rank(Granularity g) { return int(g); }

struct GazetteerEntry {
    std::string place_id;
    std::string name;
    std::vector<std::string> aliases;
    LatLon position;
    Granularity granularity = Granularity::other;
    std::int64_t population = 0;
    std::string admin_parent;  // empty = top level
};

// Token with character offsets into the original text. Tokens are maximal
// alphanumeric runs, so matching token sequences is word-boundary matching.
struct TextToken {
    std::string lowered;
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<TextToken> tokenize_with_offsets(const std::string& text);

struct PlaceTag {
    std::string surface;       // text[begin..end)
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string place_id;
    LatLon position;
    Granularity granularity = Granularity::other;
};

class Gazetteer {
public:
    // TSV columns: place_id, name, aliases(|-separated), lat, lon,
    // granularity, population, admin_parent. Blank lines and lines starting
    // with '#' are skipped. Errors carry the 1-based line number.
    static Gazetteer load(const std::string& path);
    static Gazetteer from_tsv(const std::string& text, const std::string& origin = "gazetteer");
    static Gazetteer from_entries(std::vector<GazetteerEntry> entries);

    const std::vector<GazetteerEntry>& entries() const { return entries_; }
    const GazetteerEntry* find(const std::string& place_id) const;

    // Throws ValidationError on an unknown id.
    Granularity granularity_of(const std::string& place_id) const;

    // building -> city -> region -> country walk; includes the entry itself.
    std::vector<std::string> parent_chain(const std::string& place_id) const;

private:
    void validate();

    std::vector<GazetteerEntry> entries_;
    std::map<std::string, std::size_t> by_id_;
};

// Multi-pattern matcher over the gazetteer: names and aliases are compiled
// into a token trie once, then texts are scanned left to right. At each token
// position the longest match wins and matches never overlap. Entries tied on
// the same span are resolved by (1) least great-circle distance to the
// epicenter when one is given, (2) highest population, (3) finest
// granularity, (4) lowest place_id. Immutable after construction.
class Geoparser {
public:
    explicit Geoparser(const Gazetteer& gazetteer);

    std::vector<PlaceTag> parse(const std::string& text,
                                std::optional<LatLon> epicenter = std::nullopt) const;

    const Gazetteer& gazetteer() const { return *gazetteer_; }

private:
    struct TrieNode {
        std::map<std::string, std::size_t> children;
        std::vector<std::size_t> entry_indices;  // entries whose pattern ends here
    };

    const Gazetteer* gazetteer_;
    std::vector<TrieNode> nodes_;
};

// Strict-weak-order used for same-span disambiguation; exposed so tests can
// probe the tie rules directly.
bool prefer_entry(const GazetteerEntry& a, const GazetteerEntry& b,
                  const std::optional<LatLon>& epicenter);

}  // namespace quakesense
