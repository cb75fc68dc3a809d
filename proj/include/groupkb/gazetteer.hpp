#pragma once

// Alias tables that map free-text surface forms ("Russian Federation",
// "telecom", "Middle East") onto canonical tokens: ISO-3166-1 alpha-2 codes
// for countries, lowercase hyphenated tokens for everything else.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace groupkb {

enum class VocabKind { country, region, sector, motivation };

std::string_view to_string(VocabKind k) noexcept;

class Gazetteer {
public:
    using Table = std::map<std::string, std::string>;

    Gazetteer() = default;
    // Throws MalformedGazetteer when a canonical value is not itself
    // canonical, or when a value used as a key maps somewhere else.
    Gazetteer(Table countries, Table regions, Table sectors, Table motivations,
              std::map<std::string, std::vector<std::string>> region_members = {});

    static Gazetteer from_json(const nlohmann::json& j);
    static Gazetteer parse(std::string_view document);
    nlohmann::json to_json() const;

    // Case-insensitive. A canonical token always resolves to itself, so
    // lookup(lookup(x)) == lookup(x).
    std::optional<std::string> lookup(VocabKind kind, std::string_view surface) const;

    const Table& table(VocabKind kind) const noexcept;

    // Country codes that make up a region token (empty when unknown).
    const std::vector<std::string>& members_of(std::string_view region) const;
    const std::map<std::string, std::vector<std::string>>& region_members() const noexcept {
        return region_members_;
    }

private:
    void build_index();

    Table tables_[4];
    std::map<std::string, std::vector<std::string>> region_members_;
    // folded surface form / folded canonical value -> canonical value
    std::map<std::string, std::string> index_[4];
};

// The table shipped with the tool; data/gazetteer.json is its serialized form.
const Gazetteer& default_gazetteer();

// STIX 2.1 open vocabularies; tokens outside them are accepted but flagged.
bool is_standard_sector(std::string_view token) noexcept;
bool is_standard_region(std::string_view token) noexcept;
bool is_standard_motivation(std::string_view token) noexcept;

}  // namespace groupkb
