#include "groupkb/gazetteer.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "groupkb/error.hpp"
#include "groupkb/stix.hpp"
#include "text.hpp"

namespace groupkb {

namespace {

constexpr std::array<const char*, 4> kTableKeys = {"country_aliases", "region_aliases",
                                                   "sector_aliases", "motivation_keywords"};

std::size_t slot(VocabKind k) noexcept { return static_cast<std::size_t>(k); }

bool is_canonical(VocabKind kind, std::string_view value) {
    if (kind == VocabKind::country) return stix::is_country_code(value);
    return !value.empty() && text::hyphenate(value) == value;
}

bool contains(std::initializer_list<std::string_view> list, std::string_view token) noexcept {
    return std::find(list.begin(), list.end(), token) != list.end();
}

}  // namespace

std::string_view to_string(VocabKind k) noexcept {
    switch (k) {
        case VocabKind::country: return "country";
        case VocabKind::region: return "region";
        case VocabKind::sector: return "sector";
        case VocabKind::motivation: return "motivation";
    }
    return "country";
}

Gazetteer::Gazetteer(Table countries, Table regions, Table sectors, Table motivations,
                     std::map<std::string, std::vector<std::string>> region_members)
    : tables_{std::move(countries), std::move(regions), std::move(sectors), std::move(motivations)},
      region_members_(std::move(region_members)) {
    build_index();
}

void Gazetteer::build_index() {
    for (std::size_t k = 0; k < 4; ++k) {
        const auto kind = static_cast<VocabKind>(k);
        index_[k].clear();
        for (const auto& [surface, value] : tables_[k]) {
            if (!is_canonical(kind, value))
                throw MalformedGazetteer(std::string(to_string(kind)) + " value \"" + value +
                                         "\" is not canonical");
            index_[k].emplace(text::fold(value), value);
        }
        for (const auto& [surface, value] : tables_[k]) {
            const auto key = text::fold(surface);
            auto [it, inserted] = index_[k].emplace(key, value);
            if (!inserted && it->second != value)
                throw MalformedGazetteer("\"" + surface + "\" maps to both \"" + it->second +
                                         "\" and \"" + value + "\"");
        }
    }
    for (const auto& [region, members] : region_members_) {
        if (!is_canonical(VocabKind::region, region))
            throw MalformedGazetteer("region_members key \"" + region + "\" is not canonical");
        for (const auto& c : members)
            if (!stix::is_country_code(c))
                throw MalformedGazetteer("region_members[" + region + "] has bad code \"" + c + "\"");
    }
}

Gazetteer Gazetteer::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw MalformedGazetteer("top level is not an object");
    Table tables[4];
    for (std::size_t k = 0; k < 4; ++k) {
        auto it = j.find(kTableKeys[k]);
        if (it == j.end()) continue;
        if (!it->is_object()) throw MalformedGazetteer(std::string(kTableKeys[k]) + " is not an object");
        for (const auto& [surface, value] : it->items()) {
            if (!value.is_string())
                throw MalformedGazetteer(std::string(kTableKeys[k]) + "[" + surface + "] is not a string");
            tables[k].emplace(surface, value.get<std::string>());
        }
    }
    std::map<std::string, std::vector<std::string>> members;
    if (auto it = j.find("region_members"); it != j.end()) {
        if (!it->is_object()) throw MalformedGazetteer("region_members is not an object");
        for (const auto& [region, list] : it->items()) {
            if (!list.is_array()) throw MalformedGazetteer("region_members[" + region + "] is not an array");
            for (const auto& c : list) {
                if (!c.is_string()) throw MalformedGazetteer("region_members[" + region + "] has a non-string");
                members[region].push_back(c.get<std::string>());
            }
        }
    }
    return Gazetteer(std::move(tables[0]), std::move(tables[1]), std::move(tables[2]),
                     std::move(tables[3]), std::move(members));
}

Gazetteer Gazetteer::parse(std::string_view document) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedGazetteer(e.what());
    }
    return from_json(j);
}

nlohmann::json Gazetteer::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t k = 0; k < 4; ++k) j[kTableKeys[k]] = tables_[k];
    j["region_members"] = region_members_;
    return j;
}

std::optional<std::string> Gazetteer::lookup(VocabKind kind, std::string_view surface) const {
    const auto key = text::fold(text::trim(surface));
    const auto& idx = index_[slot(kind)];
    if (auto it = idx.find(key); it != idx.end()) return it->second;
    return std::nullopt;
}

const Gazetteer::Table& Gazetteer::table(VocabKind kind) const noexcept { return tables_[slot(kind)]; }

const std::vector<std::string>& Gazetteer::members_of(std::string_view region) const {
    static const std::vector<std::string> kEmpty;
    auto it = region_members_.find(std::string(region));
    return it == region_members_.end() ? kEmpty : it->second;
}

bool is_standard_sector(std::string_view t) noexcept {
    return contains({"agriculture", "aerospace", "automotive", "chemical", "commercial",
                     "communications", "construction", "defense", "education", "energy",
                     "entertainment", "financial-services", "government",
                     "government-emergency-services", "government-local", "government-national",
                     "government-public-services", "government-regional", "healthcare",
                     "hospitality-leisure", "infrastructure", "infrastructure-dams",
                     "infrastructure-nuclear", "infrastructure-water", "insurance",
                     "manufacturing", "mining", "non-profit", "pharmaceuticals", "retail",
                     "technology", "telecommunications", "transportation", "utilities"},
                    t);
}

bool is_standard_region(std::string_view t) noexcept {
    return contains({"africa", "eastern-africa", "middle-africa", "northern-africa",
                     "southern-africa", "western-africa", "americas", "caribbean",
                     "central-america", "latin-america-caribbean", "northern-america",
                     "south-america", "asia", "central-asia", "eastern-asia", "southern-asia",
                     "south-eastern-asia", "western-asia", "europe", "eastern-europe",
                     "northern-europe", "southern-europe", "western-europe", "oceania",
                     "antarctica", "australia-new-zealand", "melanesia", "micronesia",
                     "polynesia"},
                    t);
}

bool is_standard_motivation(std::string_view t) noexcept {
    return contains({"accidental", "coercion", "dominance", "ideology", "notoriety",
                     "organizational-gain", "personal-gain", "personal-satisfaction", "revenge",
                     "unpredictable"},
                    t);
}

const Gazetteer& default_gazetteer() {
    static const Gazetteer g = [] {
        Gazetteer::Table countries = {
            {"Russia", "RU"}, {"Russian Federation", "RU"}, {"Russian", "RU"},
            {"United States", "US"}, {"United States of America", "US"}, {"USA", "US"},
            {"US", "US"}, {"U.S.", "US"},
            {"United Kingdom", "GB"}, {"UK", "GB"}, {"Great Britain", "GB"}, {"Britain", "GB"},
            {"China", "CN"}, {"People's Republic of China", "CN"}, {"PRC", "CN"}, {"Chinese", "CN"},
            {"Iran", "IR"}, {"Islamic Republic of Iran", "IR"}, {"Iranian", "IR"},
            {"North Korea", "KP"}, {"DPRK", "KP"}, {"North Korean", "KP"},
            {"South Korea", "KR"}, {"Republic of Korea", "KR"},
            {"Ukraine", "UA"}, {"Ukrainian", "UA"}, {"Germany", "DE"}, {"France", "FR"},
            {"Brazil", "BR"}, {"India", "IN"}, {"Pakistan", "PK"}, {"Vietnam", "VN"},
            {"Viet Nam", "VN"}, {"Israel", "IL"}, {"Saudi Arabia", "SA"}, {"Japan", "JP"},
            {"Taiwan", "TW"}, {"Turkey", "TR"}, {"Canada", "CA"}, {"Mexico", "MX"},
            {"Norway", "NO"}, {"Poland", "PL"}, {"Netherlands", "NL"}, {"Italy", "IT"},
            {"Spain", "ES"}, {"Australia", "AU"}, {"Lebanon", "LB"}, {"Syria", "SY"},
            {"United Arab Emirates", "AE"}, {"UAE", "AE"}, {"Kazakhstan", "KZ"},
            {"Belarus", "BY"}, {"Switzerland", "CH"}, {"Singapore", "SG"},
        };
        Gazetteer::Table regions = {
            {"Europe", "europe"}, {"European", "europe"},
            {"Western Europe", "western-europe"}, {"Eastern Europe", "eastern-europe"},
            {"North America", "north-america"}, {"Northern America", "northern-america"},
            {"South America", "south-america"}, {"Latin America", "latin-america-caribbean"},
            {"Asia", "asia"}, {"Central Asia", "central-asia"}, {"East Asia", "eastern-asia"},
            {"Southeast Asia", "south-eastern-asia"}, {"South Asia", "southern-asia"},
            {"Middle East", "western-asia"}, {"Africa", "africa"}, {"Oceania", "oceania"},
        };
        Gazetteer::Table sectors = {
            {"Government", "government"}, {"Governments", "government"},
            {"Government networks", "government"}, {"Government agencies", "government"},
            {"Consulting", "consulting"},
            {"Technology", "technology"}, {"Tech", "technology"},
            {"Telecom", "telecommunications"}, {"Telecoms", "telecommunications"},
            {"Telecommunications", "telecommunications"},
            {"Telecommunication", "telecommunications"},
            {"Think Tanks", "think-tanks"}, {"Think Tank", "think-tanks"},
            {"Research Institutes", "research-institutes"},
            {"Research Institute", "research-institutes"},
            {"Defense", "defense"}, {"Defence", "defense"}, {"Military", "defense"},
            {"Energy", "energy"}, {"Oil and Gas", "energy"},
            {"Financial", "financial-services"}, {"Finance", "financial-services"},
            {"Financial Services", "financial-services"}, {"Banks", "financial-services"},
            {"Banking", "financial-services"},
            {"Healthcare", "healthcare"}, {"Health Care", "healthcare"},
            {"Education", "education"}, {"Universities", "education"},
            {"Aerospace", "aerospace"}, {"Manufacturing", "manufacturing"},
            {"Transportation", "transportation"}, {"Utilities", "utilities"},
            {"Pharmaceutical", "pharmaceuticals"}, {"Pharmaceuticals", "pharmaceuticals"},
            {"Retail", "retail"}, {"Hospitality", "hospitality-leisure"},
            {"Chemical", "chemical"}, {"Non-profit", "non-profit"}, {"NGOs", "non-profit"},
            {"Critical Infrastructure", "infrastructure"}, {"Media", "media"},
        };
        Gazetteer::Table motivations = {
            {"espionage", "organizational-gain"}, {"cyber espionage", "organizational-gain"},
            {"intelligence gathering", "organizational-gain"},
            {"organizational gain", "organizational-gain"},
            {"financially motivated", "personal-gain"}, {"financially-motivated", "personal-gain"},
            {"financial gain", "personal-gain"}, {"personal gain", "personal-gain"},
            {"hacktivist", "ideology"}, {"hacktivism", "ideology"}, {"ideological", "ideology"},
            {"sabotage", "dominance"}, {"destructive", "dominance"},
            {"notoriety", "notoriety"}, {"revenge", "revenge"}, {"coercion", "coercion"},
        };
        std::map<std::string, std::vector<std::string>> members = {
            {"north-america", {"CA", "MX", "US"}},
            {"northern-america", {"CA", "US"}},
            {"europe", {"AD", "AL", "AT", "BA", "BE", "BG", "BY", "CH", "CY", "CZ", "DE", "DK",
                        "EE", "ES", "FI", "FR", "GB", "GR", "HR", "HU", "IE", "IS", "IT", "LI",
                        "LT", "LU", "LV", "MC", "MD", "ME", "MK", "MT", "NL", "NO", "PL", "PT",
                        "RO", "RS", "RU", "SE", "SI", "SK", "SM", "UA", "VA"}},
            {"western-europe", {"AT", "BE", "CH", "DE", "FR", "LI", "LU", "MC", "NL"}},
            {"eastern-europe", {"BG", "BY", "CZ", "HU", "MD", "PL", "RO", "RU", "SK", "UA"}},
            {"asia", {"AE", "AF", "AM", "AZ", "BD", "BH", "CN", "GE", "HK", "ID", "IL", "IN",
                      "IQ", "IR", "JO", "JP", "KG", "KH", "KP", "KR", "KW", "KZ", "LA", "LB",
                      "LK", "MM", "MN", "MY", "NP", "OM", "PH", "PK", "QA", "SA", "SG", "SY",
                      "TH", "TJ", "TM", "TR", "TW", "UZ", "VN", "YE"}},
            {"western-asia", {"AE", "AM", "AZ", "BH", "CY", "GE", "IL", "IQ", "IR", "JO", "KW",
                              "LB", "OM", "QA", "SA", "SY", "TR", "YE"}},
            {"eastern-asia", {"CN", "HK", "JP", "KP", "KR", "MN", "TW"}},
            {"south-eastern-asia", {"ID", "KH", "LA", "MM", "MY", "PH", "SG", "TH", "VN"}},
            {"southern-asia", {"AF", "BD", "IN", "IR", "LK", "NP", "PK"}},
            {"central-asia", {"KG", "KZ", "TJ", "TM", "UZ"}},
            {"south-america", {"AR", "BO", "BR", "CL", "CO", "EC", "PE", "PY", "UY", "VE"}},
        };
        return Gazetteer(std::move(countries), std::move(regions), std::move(sectors),
                         std::move(motivations), std::move(members));
    }();
    return g;
}

}  // namespace groupkb
