#pragma once

// Grafts per-group annotations (country of origin, targeted countries,
// regions and sectors, motivations) onto a bundle as location and identity
// nodes plus originates-from / targets relationships, and drafts such
// annotations from a group's description text.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "groupkb/gazetteer.hpp"
#include "groupkb/stix.hpp"

namespace groupkb {

enum class Attribution { suspected, confirmed };

std::string_view to_string(Attribution a) noexcept;

// STIX confidence written on originates-from edges.
inline constexpr int kSuspectedConfidence = 50;
inline constexpr int kConfirmedConfidence = 90;

struct EnrichmentRecord {
    std::string group_key;  // G####, exact name, or alias
    std::optional<std::string> origin_country;
    std::optional<Attribution> origin_attribution;
    std::vector<std::string> target_countries;
    std::vector<std::string> target_regions;
    std::vector<std::string> target_sectors;
    std::optional<std::string> primary_motivation;
    std::vector<std::string> secondary_motivations;

    friend bool operator==(const EnrichmentRecord&, const EnrichmentRecord&) = default;
};

nlohmann::json to_json(const EnrichmentRecord& r);

struct EnrichmentWarning {
    enum class Kind {
        UnknownCountry,        // surface form dropped
        UnknownRegion,         // surface form dropped
        UnknownMotivation,     // surface form dropped
        CustomSector,          // not in the gazetteer; admitted as a hyphenated token
        NonStandardSector,     // gazetteer token outside the STIX vocabulary
        MissingAttribution,    // origin given without attribution; assumed suspected
        AttributionWithoutOrigin,
    };
    Kind kind;
    std::string group_key;
    std::string value;

    friend bool operator==(const EnrichmentWarning&, const EnrichmentWarning&) = default;
};

std::string_view to_string(EnrichmentWarning::Kind k) noexcept;

struct LoadedEnrichment {
    std::vector<EnrichmentRecord> records;
    std::vector<EnrichmentWarning> warnings;
};

// Parses the enrichment file (a JSON array of records) and canonicalizes
// every value through the gazetteer. Throws MalformedEnrichmentFile and
// DuplicateGroupKey.
LoadedEnrichment load_enrichment(std::string_view document,
                                 const Gazetteer& gazetteer = default_gazetteer());

// Canonicalizes a single record in place, appending warnings.
void canonicalize(EnrichmentRecord& record, const Gazetteer& gazetteer,
                  std::vector<EnrichmentWarning>& warnings);

struct EnrichmentReport {
    std::size_t groups_matched = 0;
    std::vector<std::string> groups_unmatched;
    std::vector<std::string> groups_ambiguous;
    std::size_t locations_created = 0;
    std::size_t identities_created = 0;
    std::size_t relationships_created = 0;
    std::size_t motivations_set = 0;

    std::size_t objects_created() const noexcept {
        return locations_created + identities_created + relationships_created;
    }
};

struct ApplyOptions {
    // created/modified of every object the step creates.
    std::string timestamp = "2021-04-29T00:00:00.000Z";
};

struct ApplyResult {
    stix::Bundle bundle;
    EnrichmentReport report;
};

// Records are expected to be canonical (as returned by load_enrichment).
// Deterministic and idempotent: node ids are name-based UUIDs and existing
// nodes/edges with the same canonical value are reused.
ApplyResult apply_enrichment(const stix::Bundle& bundle, std::span<const EnrichmentRecord> records,
                             const ApplyOptions& options = {});

// Deterministic ids of the shared nodes.
stix::StixId country_location_id(std::string_view code);
stix::StixId region_location_id(std::string_view region);
stix::StixId sector_identity_id(std::string_view sector);

// Where a drafted token came from: description.substr(begin, end - begin).
struct Witness {
    VocabKind kind;
    std::string token;
    std::size_t begin;
    std::size_t end;
};

struct DraftRecord {
    EnrichmentRecord record;
    bool draft = true;
    std::vector<Witness> witnesses;
};

struct SuggestOptions {
    std::vector<std::string> attribution_cues = {"attributed", "attribution", "state-sponsored", "suspected",
                                                 "based"};
    std::size_t cue_window = 40;
};

// Longest-match gazetteer scan of the description. Throws NoDescription.
DraftRecord suggest_enrichment(const stix::IntrusionSet& group, const Gazetteer& gazetteer,
                               const SuggestOptions& options = {});

}  // namespace groupkb
