#include "quakesense/fixtures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "quakesense/errors.hpp"
#include "quakesense/rng.hpp"
#include "quakesense/templates.hpp"

namespace quakesense {

namespace {

// fraction of corpus labels flipped to mimic imperfect manual annotation
constexpr double kAnnotationNoise = 0.04;

struct AnchorRow {
    const char* id;
    const char* name;
    const char* aliases;  // |-separated, may be empty
    double lat;
    double lon;
    Granularity gran;
    std::int64_t pop;
    const char* parent;
};

constexpr Granularity kCity = Granularity::city;
constexpr Granularity kRegion = Granularity::region;
constexpr Granularity kCountry = Granularity::country;
constexpr Granularity kBuilding = Granularity::building;
constexpr Granularity kOther = Granularity::other;

// Parents precede children. Clusters sit around the five scenario epicenters;
// Dublin, Carmen, Valencia and Springfield appear twice on purpose.
const AnchorRow kAnchors[] = {
    {"us", "United States", "USA", 39.80, -98.60, kCountry, 330000000, ""},
    {"np", "Nepal", "", 28.40, 84.10, kCountry, 28000000, ""},
    {"ph", "Philippines", "", 12.90, 121.80, kCountry, 103000000, ""},
    {"pg", "Papua New Guinea", "PNG", -6.30, 145.30, kCountry, 8000000, ""},
    {"ie", "Ireland", "", 53.40, -8.00, kCountry, 4900000, ""},

    {"california", "California", "", 36.80, -119.40, kRegion, 39000000, "us"},
    {"texas", "Texas", "", 31.00, -99.00, kRegion, 29000000, "us"},
    {"illinois", "Illinois", "", 40.00, -89.20, kRegion, 12700000, "us"},
    {"bagmati", "Bagmati", "", 27.80, 85.40, kRegion, 6100000, "np"},
    {"gandaki", "Gandaki", "", 28.30, 84.20, kRegion, 2400000, "np"},
    {"bohol", "Bohol", "", 9.84, 124.14, kRegion, 1300000, "ph"},
    {"cebu", "Cebu", "", 10.40, 123.80, kRegion, 2900000, "ph"},
    {"enb", "East New Britain", "", -4.60, 151.90, kRegion, 330000, "pg"},

    // San Ramon cluster
    {"san-ramon", "San Ramon", "", 37.78, -121.98, kCity, 75000, "california"},
    {"danville", "Danville", "", 37.82, -122.00, kCity, 44000, "california"},
    {"dublin-ca", "Dublin", "", 37.70, -121.94, kCity, 65000, "california"},
    {"pleasanton", "Pleasanton", "", 37.66, -121.87, kCity, 80000, "california"},
    {"livermore", "Livermore", "", 37.68, -121.77, kCity, 90000, "california"},
    {"walnut-creek", "Walnut Creek", "", 37.91, -122.06, kCity, 70000, "california"},
    {"concord-ca", "Concord", "", 37.98, -122.03, kCity, 125000, "california"},
    {"oakland", "Oakland", "", 37.80, -122.27, kCity, 430000, "california"},
    {"berkeley", "Berkeley", "", 37.87, -122.27, kCity, 120000, "california"},
    {"hayward", "Hayward", "", 37.67, -122.08, kCity, 160000, "california"},
    {"fremont", "Fremont", "", 37.55, -121.99, kCity, 230000, "california"},
    {"alamo", "Alamo", "", 37.85, -122.03, kCity, 15000, "california"},
    {"lafayette", "Lafayette", "", 37.89, -122.12, kCity, 26000, "california"},
    {"orinda", "Orinda", "", 37.88, -122.18, kCity, 19000, "california"},
    {"moraga", "Moraga", "", 37.83, -122.13, kCity, 17000, "california"},
    {"san-leandro", "San Leandro", "", 37.72, -122.16, kCity, 90000, "california"},
    {"castro-valley", "Castro Valley", "", 37.69, -122.09, kCity, 63000, "california"},
    {"martinez", "Martinez", "", 38.02, -122.13, kCity, 38000, "california"},
    {"antioch", "Antioch", "", 38.00, -121.81, kCity, 110000, "california"},
    {"brentwood-ca", "Brentwood", "", 37.93, -121.70, kCity, 64000, "california"},
    {"srgh", "San Ramon General Hospital", "", 37.79, -121.97, kBuilding, 0, "san-ramon"},
    {"iron-horse-bridge", "Iron Horse Bridge", "", 37.77, -121.97, kBuilding, 0, "san-ramon"},
    {"old-danville-library", "Old Danville Library", "", 37.82, -121.99, kBuilding, 0, "danville"},
    {"bishop-ranch", "Bishop Ranch", "", 37.76, -121.96, kBuilding, 0, "san-ramon"},
    {"mount-diablo", "Mount Diablo", "", 37.88, -121.91, kOther, 0, "california"},
    {"las-trampas", "Las Trampas Ridge", "", 37.82, -122.05, kOther, 0, "california"},

    // Irving cluster
    {"irving", "Irving", "", 32.81, -96.95, kCity, 240000, "texas"},
    {"dallas", "Dallas", "", 32.78, -96.80, kCity, 1300000, "texas"},
    {"fort-worth", "Fort Worth", "", 32.76, -97.33, kCity, 900000, "texas"},
    {"arlington-tx", "Arlington", "", 32.74, -97.11, kCity, 400000, "texas"},
    {"plano", "Plano", "", 33.02, -96.70, kCity, 290000, "texas"},
    {"garland", "Garland", "", 32.91, -96.64, kCity, 240000, "texas"},
    {"grand-prairie", "Grand Prairie", "", 32.75, -97.00, kCity, 195000, "texas"},
    {"carrollton", "Carrollton", "", 32.98, -96.89, kCity, 135000, "texas"},
    {"richardson", "Richardson", "", 32.95, -96.73, kCity, 120000, "texas"},
    {"mesquite", "Mesquite", "", 32.77, -96.60, kCity, 145000, "texas"},
    {"denton", "Denton", "", 33.21, -97.13, kCity, 140000, "texas"},
    {"frisco", "Frisco", "", 33.15, -96.82, kCity, 200000, "texas"},
    {"euless", "Euless", "", 32.84, -97.08, kCity, 56000, "texas"},
    {"bedford-tx", "Bedford", "", 32.84, -97.14, kCity, 49000, "texas"},
    {"grapevine", "Grapevine", "", 32.93, -97.08, kCity, 54000, "texas"},
    {"lewisville", "Lewisville", "", 33.05, -96.99, kCity, 110000, "texas"},
    {"coppell", "Coppell", "", 32.95, -97.01, kCity, 42000, "texas"},
    {"addison-tx", "Addison", "", 32.96, -96.83, kCity, 16000, "texas"},
    {"springfield-tx", "Springfield", "", 32.63, -96.54, kCity, 16000, "texas"},
    {"springfield-il", "Springfield", "", 39.80, -89.64, kCity, 115000, "illinois"},
    {"irving-convention-center", "Irving Convention Center", "", 32.82, -96.94, kBuilding, 0, "irving"},
    {"trinity-river-bridge", "Trinity River Bridge", "", 32.79, -96.87, kBuilding, 0, "dallas"},
    {"las-colinas-tower", "Las Colinas Tower", "", 32.88, -96.94, kBuilding, 0, "irving"},
    {"trinity-river", "Trinity River", "", 32.70, -96.70, kOther, 0, "texas"},
    {"white-rock-lake", "White Rock Lake", "", 32.83, -96.72, kOther, 0, "texas"},

    // Lamjung cluster
    {"kathmandu", "Kathmandu", "KTM", 27.71, 85.32, kCity, 1000000, "bagmati"},
    {"lalitpur", "Lalitpur", "Patan", 27.67, 85.32, kCity, 280000, "bagmati"},
    {"bhaktapur", "Bhaktapur", "", 27.67, 85.43, kCity, 83000, "bagmati"},
    {"banepa", "Banepa", "", 27.63, 85.52, kCity, 27000, "bagmati"},
    {"dhulikhel", "Dhulikhel", "", 27.62, 85.55, kCity, 16000, "bagmati"},
    {"hetauda", "Hetauda", "", 27.43, 85.03, kCity, 84000, "bagmati"},
    {"pokhara", "Pokhara", "", 28.21, 83.99, kCity, 410000, "gandaki"},
    {"besisahar", "Besisahar", "", 28.23, 84.38, kCity, 27000, "gandaki"},
    {"gorkha", "Gorkha", "", 28.00, 84.63, kCity, 33000, "gandaki"},
    {"bharatpur-np", "Bharatpur", "", 27.68, 84.43, kCity, 280000, "bagmati"},
    {"damauli", "Damauli", "", 27.97, 84.28, kCity, 35000, "gandaki"},
    {"sundarbazar", "Sundarbazar", "", 28.13, 84.40, kCity, 22000, "gandaki"},
    {"khudi", "Khudi", "", 28.28, 84.36, kCity, 6000, "gandaki"},
    {"chame", "Chame", "", 28.55, 84.24, kCity, 2000, "gandaki"},
    {"dharahara", "Dharahara Tower", "", 27.70, 85.31, kBuilding, 0, "kathmandu"},
    {"pashupatinath", "Pashupatinath Temple", "", 27.71, 85.35, kBuilding, 0, "kathmandu"},
    {"besisahar-hospital", "Besisahar District Hospital", "", 28.23, 84.37, kBuilding, 0, "besisahar"},
    {"manaslu", "Mount Manaslu", "", 28.55, 84.56, kOther, 0, "gandaki"},
    {"marsyangdi", "Marsyangdi River", "", 28.23, 84.30, kOther, 0, "gandaki"},

    // Bohol cluster
    {"lila", "Lila", "", 9.74, 124.10, kCity, 12000, "bohol"},
    {"tagbilaran", "Tagbilaran", "", 9.65, 123.85, kCity, 105000, "bohol"},
    {"baclayon", "Baclayon", "", 9.62, 123.91, kCity, 20000, "bohol"},
    {"loboc", "Loboc", "", 9.64, 124.03, kCity, 17000, "bohol"},
    {"loay", "Loay", "", 9.60, 124.01, kCity, 16000, "bohol"},
    {"jagna", "Jagna", "", 9.65, 124.37, kCity, 33000, "bohol"},
    {"carmen-bohol", "Carmen", "", 9.82, 124.19, kCity, 47000, "bohol"},
    {"carmen-cebu", "Carmen", "", 10.58, 124.02, kCity, 47500, "cebu"},
    {"talibon", "Talibon", "", 10.08, 124.32, kCity, 61000, "bohol"},
    {"tubigon", "Tubigon", "", 9.95, 123.97, kCity, 45000, "bohol"},
    {"dauis", "Dauis", "", 9.63, 123.87, kCity, 39000, "bohol"},
    {"panglao", "Panglao", "", 9.58, 123.75, kCity, 33000, "bohol"},
    {"dimiao", "Dimiao", "", 9.61, 124.17, kCity, 14000, "bohol"},
    {"valencia-bohol", "Valencia", "", 9.61, 124.20, kCity, 20000, "bohol"},
    {"sierra-bullones", "Sierra Bullones", "", 9.80, 124.28, kCity, 24000, "bohol"},
    {"cebu-city", "Cebu City", "", 10.32, 123.90, kCity, 920000, "cebu"},
    {"tagbilaran-hospital", "Tagbilaran City Hospital", "", 9.65, 123.86, kBuilding, 0, "tagbilaran"},
    {"loboc-church", "Loboc Church", "", 9.64, 124.03, kBuilding, 0, "loboc"},
    {"lila-pier", "Lila Pier", "", 9.73, 124.10, kBuilding, 0, "lila"},
    {"chocolate-hills", "Chocolate Hills", "", 9.80, 124.17, kOther, 0, "bohol"},
    {"hinagdanan", "Hinagdanan Cave", "", 9.62, 123.77, kOther, 0, "bohol"},

    // Kokopo cluster
    {"kokopo", "Kokopo", "", -4.34, 152.27, kCity, 26000, "enb"},
    {"rabaul", "Rabaul", "", -4.20, 152.17, kCity, 8000, "enb"},
    {"kerevat", "Kerevat", "", -4.35, 152.03, kCity, 10000, "enb"},
    {"vunadidir", "Vunadidir", "", -4.42, 152.16, kCity, 5000, "enb"},
    {"toma", "Toma", "", -4.48, 152.13, kCity, 4000, "enb"},
    {"raluana", "Raluana", "", -4.30, 152.22, kCity, 6000, "enb"},
    {"mioko", "Mioko", "", -4.23, 152.46, kCity, 2000, "enb"},
    {"kavieng", "Kavieng", "", -2.57, 150.80, kCity, 18000, "pg"},
    {"lae", "Lae", "", -6.73, 147.00, kCity, 76000, "pg"},
    {"port-moresby", "Port Moresby", "", -9.44, 147.18, kCity, 365000, "pg"},
    {"madang", "Madang", "", -5.22, 145.80, kCity, 27000, "pg"},
    {"vunapope-hospital", "Vunapope Hospital", "", -4.35, 152.28, kBuilding, 0, "kokopo"},
    {"kokopo-market", "Kokopo Market", "", -4.34, 152.26, kBuilding, 0, "kokopo"},
    {"rabaul-wharf", "Rabaul Wharf", "", -4.20, 152.18, kBuilding, 0, "rabaul"},
    {"tavurvur", "Mount Tavurvur", "", -4.24, 152.20, kOther, 0, "enb"},
    {"simpson-harbour", "Simpson Harbour", "", -4.20, 152.18, kOther, 0, "enb"},

    // far-field references
    {"new-york", "New York", "NYC|New York City", 40.71, -74.01, kCity, 8400000, "us"},
    {"dublin-ie", "Dublin", "", 53.35, -6.26, kCity, 550000, "ie"},
};

const std::vector<std::string>& name_prefixes() {
    static const std::vector<std::string> v{
        "Kar",  "Bel",  "Nor", "Tal", "Mira", "Osh", "Vel",  "Dun",  "Sar",  "Pol",
        "Qui",  "Zan",  "Hol", "Fen", "Gra",  "Lum", "Tor",  "Ard",  "Bren", "Cas",
        "Del",  "Mor",  "Sel", "Tan", "Vor",  "Wil", "Yar",  "Kel",  "Ryn",  "Thal",
        "Bar",  "Cor",  "Dor", "Eli", "Fal",  "Gors", "Hab", "Ister", "Jor", "Lan"};
    return v;
}

const std::vector<std::string>& name_middles() {
    static const std::vector<std::string> v{"a",  "e",  "i",  "o",  "u",  "an", "en",
                                            "in", "on", "ul", "ar", "or", "es", ""};
    return v;
}

const std::vector<std::string>& name_suffixes() {
    static const std::vector<std::string> v{"ton",  "ville", "burg", "mar",  "dale", "field",
                                            "stan", "grad",  "wick", "more", "heim", "pur",
                                            "ova",  "by",    "lund", "mouth", "ford", "ham",
                                            "stead", "esh"};
    return v;
}

std::string lowered_copy(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = char(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

class NamePool {
public:
    bool claim(const std::string& name) { return taken_.insert(lowered_copy(name)).second; }

    std::string fresh(Rng& rng) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            std::string name = rng.pick(name_prefixes()) + rng.pick(name_middles()) +
                               rng.pick(name_suffixes());
            if (attempt > 16) name += rng.pick(name_suffixes());
            if (claim(name)) return name;
        }
        throw ValidationError("gazetteer name pool exhausted");
    }

private:
    std::set<std::string> taken_;
};

double clamp_lat(double lat) { return std::max(-85.0, std::min(85.0, lat)); }

double wrap_lon(double lon) {
    while (lon > 180.0) lon -= 360.0;
    while (lon < -180.0) lon += 360.0;
    return lon;
}

}  // namespace

std::vector<GazetteerEntry> synthetic_gazetteer_entries(std::size_t count, std::uint64_t seed) {
    Rng rng(seed, "gazetteer");
    std::vector<GazetteerEntry> out;
    out.reserve(count);
    NamePool pool;
    std::size_t id_counter = 0;

    const auto push = [&](GazetteerEntry entry) {
        if (out.size() < count) out.push_back(std::move(entry));
    };

    for (const auto& row : kAnchors) {
        GazetteerEntry e;
        e.place_id = row.id;
        e.name = row.name;
        if (row.aliases[0] != '\0') {
            std::string alias;
            for (const char* p = row.aliases;; ++p) {
                if (*p == '|' || *p == '\0') {
                    e.aliases.push_back(alias);
                    alias.clear();
                    if (*p == '\0') break;
                } else {
                    alias.push_back(*p);
                }
            }
        }
        e.position = LatLon{row.lat, row.lon};
        e.granularity = row.gran;
        e.population = row.pop;
        e.admin_parent = row.parent;
        pool.claim(e.name);
        for (const auto& alias : e.aliases) pool.claim(alias);
        push(std::move(e));
        if (out.size() == count) return out;
    }

    const auto next_id = [&] {
        char buf[16];
        std::snprintf(buf, sizeof buf, "g%05zu", ++id_counter);
        return std::string(buf);
    };

    std::vector<std::string> twin_queue;  // names to duplicate in a later cluster

    while (out.size() < count) {
        // one generated cluster: country, regions, cities with occasional
        // buildings and aliases, a couple of natural features
        const LatLon center{rng.uniform(-48.0, 62.0), rng.uniform(-170.0, 170.0)};
        GazetteerEntry country;
        country.place_id = next_id();
        country.name = pool.fresh(rng);
        country.position = center;
        country.granularity = kCountry;
        country.population = rng.range(2'000'000, 220'000'000);
        const std::string country_id = country.place_id;
        push(std::move(country));
        if (out.size() == count) break;

        struct RegionRef {
            std::string id;
            LatLon position;
        };
        std::vector<RegionRef> regions;
        for (int r = 0; r < 3 && out.size() < count; ++r) {
            GazetteerEntry region;
            region.place_id = next_id();
            region.name = pool.fresh(rng);
            region.position = LatLon{clamp_lat(center.lat + rng.uniform(-4.0, 4.0)),
                                     wrap_lon(center.lon + rng.uniform(-4.0, 4.0))};
            region.granularity = kRegion;
            region.population = rng.range(300'000, 25'000'000);
            region.admin_parent = country_id;
            regions.push_back(RegionRef{region.place_id, region.position});
            push(std::move(region));
        }
        if (regions.empty() || out.size() == count) break;

        const std::size_t cities = 70 + rng.below(60);
        for (std::size_t c = 0; c < cities && out.size() < count; ++c) {
            const RegionRef& region = regions[rng.below(regions.size())];
            GazetteerEntry city;
            city.place_id = next_id();
            if (!twin_queue.empty() && rng.bernoulli(0.5)) {
                city.name = twin_queue.back();
                twin_queue.pop_back();
            } else {
                city.name = pool.fresh(rng);
                if (rng.bernoulli(0.012)) twin_queue.push_back(city.name);
                if (rng.bernoulli(0.10)) {
                    static const char* const kForms[] = {"Port ", "New ", "", ""};
                    const char* prefix = kForms[rng.below(4)];
                    std::string two_word =
                        prefix[0] ? prefix + city.name : city.name + " Heights";
                    if (pool.claim(two_word)) city.name = std::move(two_word);
                }
            }
            city.position = LatLon{clamp_lat(region.position.lat + rng.uniform(-1.2, 1.2)),
                                   wrap_lon(region.position.lon + rng.uniform(-1.2, 1.2))};
            city.granularity = kCity;
            // heavy-tailed population spread so the median split is meaningful
            city.population = std::int64_t(1500.0 * std::exp(rng.uniform(0.0, 8.0)));
            city.admin_parent = region.id;
            if (rng.bernoulli(0.08)) {
                static const char* const kAliasForms[] = {" City", " Town"};
                std::string alias = rng.bernoulli(0.5)
                                        ? city.name + kAliasForms[rng.below(2)]
                                        : "Old " + city.name;
                if (pool.claim(alias)) city.aliases.push_back(std::move(alias));
            }
            const std::string city_id = city.place_id;
            const LatLon city_pos = city.position;
            const std::string city_name = city.name;
            push(std::move(city));
            if (out.size() == count) break;

            if (rng.bernoulli(0.15)) {
                static const char* const kKinds[] = {" General Hospital", " Bridge", " Market",
                                                     " Town Hall"};
                GazetteerEntry building;
                building.place_id = next_id();
                building.name = city_name + kKinds[rng.below(4)];
                if (!pool.claim(building.name)) continue;
                building.position = LatLon{clamp_lat(city_pos.lat + rng.uniform(-0.03, 0.03)),
                                           wrap_lon(city_pos.lon + rng.uniform(-0.03, 0.03))};
                building.granularity = kBuilding;
                building.population = 0;
                building.admin_parent = city_id;
                push(std::move(building));
            }
        }

        for (int f = 0; f < 2 && out.size() < count; ++f) {
            GazetteerEntry feature;
            feature.place_id = next_id();
            static const char* const kFeatureForms[] = {"Mount ", "Lake "};
            feature.name = kFeatureForms[rng.below(2)] + pool.fresh(rng);
            if (!pool.claim(feature.name)) continue;
            feature.position = LatLon{clamp_lat(center.lat + rng.uniform(-3.0, 3.0)),
                                      wrap_lon(center.lon + rng.uniform(-3.0, 3.0))};
            feature.granularity = kOther;
            feature.population = 0;
            feature.admin_parent = regions[rng.below(regions.size())].id;
            push(std::move(feature));
        }
    }
    return out;
}

std::string gazetteer_to_tsv(const std::vector<GazetteerEntry>& entries) {
    std::ostringstream out;
    out << "# place_id\tname\taliases\tlat\tlon\tgranularity\tpopulation\tadmin_parent\n";
    char buf[64];
    for (const auto& e : entries) {
        std::string aliases;
        for (std::size_t i = 0; i < e.aliases.size(); ++i) {
            if (i > 0) aliases += '|';
            aliases += e.aliases[i];
        }
        std::snprintf(buf, sizeof buf, "%.6f\t%.6f", e.position.lat, e.position.lon);
        out << e.place_id << '\t' << e.name << '\t' << aliases << '\t' << buf << '\t'
            << to_string(e.granularity) << '\t' << e.population << '\t' << e.admin_parent
            << '\n';
    }
    return out.str();
}

const Gazetteer& bundled_gazetteer() {
    static const Gazetteer gazetteer = Gazetteer::from_entries(
        synthetic_gazetteer_entries(kBundledGazetteerSize, kBundledGazetteerSeed));
    return gazetteer;
}

namespace {

std::vector<std::string> corpus_name_pool(const Gazetteer& gazetteer) {
    std::vector<std::string> names;
    for (const auto& entry : gazetteer.entries()) names.push_back(entry.name);
    return names;
}

std::vector<std::string> pick_distinct(const std::vector<std::string>& pool, std::size_t k,
                                       Rng& rng) {
    std::vector<std::string> out;
    while (out.size() < k) {
        const std::string& candidate = pool[rng.below(pool.size())];
        if (std::find(out.begin(), out.end(), candidate) == out.end()) out.push_back(candidate);
    }
    return out;
}

}  // namespace

std::vector<LabeledExample> synthetic_relevance_corpus(const Gazetteer& gazetteer,
                                                       std::size_t count, std::uint64_t seed) {
    const auto& bank = TemplateBank::builtin();
    const auto names = corpus_name_pool(gazetteer);
    Rng rng(seed, "relevance-corpus");
    static const Archetype kArchetypes[] = {Archetype::witness, Archetype::sympathizer,
                                            Archetype::keyword_noise, Archetype::chatter};
    static const std::vector<double> kShares{0.28, 0.22, 0.30, 0.20};

    std::vector<LabeledExample> corpus;
    corpus.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Archetype archetype = kArchetypes[rng.weighted(kShares)];
        const auto& group = bank.group(archetype);
        std::vector<double> weights;
        for (const auto& tmpl : group) weights.push_back(tmpl.weight);
        const auto& tmpl = group[rng.weighted(weights)];
        const int slots = slot_count(tmpl.text);
        const auto filled = pick_distinct(names, std::size_t(slots), rng);
        // annotation noise: hand-labeled corpora are never clean
        const bool label = rng.bernoulli(kAnnotationNoise) ? !tmpl.relevant : tmpl.relevant;
        corpus.push_back(LabeledExample{render_template(tmpl.text, filled, 0.15, rng), label});
    }
    return corpus;
}

std::vector<LabeledExample> synthetic_damage_corpus(const Gazetteer& gazetteer, std::size_t count,
                                                    std::uint64_t seed, ClassifyTask task) {
    if (task != ClassifyTask::damage_presence && task != ClassifyTask::damage_info) {
        throw UsageError("damage corpus serves the damage tasks only");
    }
    const auto& bank = TemplateBank::builtin();
    const auto names = corpus_name_pool(gazetteer);
    Rng rng(seed, "damage-corpus");

    // text sources weighted toward solicited replies, which is what the
    // damage models mostly see in the pipeline
    std::vector<std::pair<const std::string*, DamageLabel>> sources;
    std::vector<double> weights;
    const auto add = [&](const std::string& text, DamageLabel damage, double weight) {
        sources.emplace_back(&text, damage);
        weights.push_back(weight);
    };
    for (const auto& t : bank.damage_collab_present()) add(t.text, t.damage, 3.0 * t.weight);
    for (const auto& t : bank.damage_collab_absent()) add(t.text, t.damage, 3.0 * t.weight);
    for (const auto& t : bank.damage_noncollab()) add(t.text, t.damage, 1.5 * t.weight);
    for (int slots = 1; slots <= 4; ++slots) {
        for (const auto& t : bank.geo_collab(slots)) add(t.text, t.damage, 0.8 * t.weight);
    }
    for (const auto& t : bank.geo_noncollab()) add(t.text, t.damage, 0.8 * t.weight);
    for (const auto& t : bank.group(Archetype::witness)) add(t.text, t.damage, 1.2 * t.weight);
    for (const auto& t : bank.group(Archetype::sympathizer)) add(t.text, t.damage, 0.5 * t.weight);

    std::vector<LabeledExample> corpus;
    corpus.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t choice = rng.weighted(weights);
        const auto& [text, damage] = sources[choice];
        const int slots = slot_count(*text);
        const auto filled = pick_distinct(names, std::size_t(slots), rng);
        bool label = task == ClassifyTask::damage_presence ? damage == DamageLabel::present
                                                           : damage != DamageLabel::no_info;
        if (rng.bernoulli(kAnnotationNoise)) label = !label;
        corpus.push_back(LabeledExample{render_template(*text, filled, 0.15, rng), label});
    }
    return corpus;
}

}  // namespace quakesense
