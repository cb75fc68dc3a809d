#include "groupkb/enrichment.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "groupkb/error.hpp"
#include "groupkb/graph.hpp"
#include "groupkb/uuid.hpp"
#include "text.hpp"

namespace groupkb {

using stix::RelationshipType;
using stix::StixId;
using Json = nlohmann::json;
using WarnKind = EnrichmentWarning::Kind;

namespace {

constexpr const char* kRecordKeys[] = {"group_key",          "origin_country",
                                       "origin_attribution", "target_countries",
                                       "target_regions",     "target_sectors",
                                       "primary_motivation", "secondary_motivations"};

void dedupe_in_order(std::vector<std::string>& v) {
    std::set<std::string> seen;
    std::erase_if(v, [&](const std::string& s) { return !seen.insert(s).second; });
}

std::optional<std::string> canonical_country(std::string_view surface, const Gazetteer& g) {
    if (auto c = g.lookup(VocabKind::country, surface)) return c;
    const auto t = text::trim(surface);
    if (t.size() == 2 && std::isalpha(static_cast<unsigned char>(t[0])) &&
        std::isalpha(static_cast<unsigned char>(t[1])))
        return text::upper(t);
    return std::nullopt;
}

std::optional<std::string> canonical_token(VocabKind kind, std::string_view surface, const Gazetteer& g,
                                           bool (*is_standard)(std::string_view) noexcept) {
    if (auto t = g.lookup(kind, surface)) return t;
    const auto h = text::hyphenate(surface);
    if (is_standard(h)) return h;
    return std::nullopt;
}

std::optional<std::string> opt_string(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw MalformedEnrichmentFile(std::string(key) + " must be a string");
    return it->get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const char* key) {
    std::vector<std::string> out;
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return out;
    if (!it->is_array()) throw MalformedEnrichmentFile(std::string(key) + " must be an array");
    for (const auto& v : *it) {
        if (!v.is_string()) throw MalformedEnrichmentFile(std::string(key) + " must contain strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

stix::Common new_common(const StixId& id, const stix::Timestamp& ts, std::optional<std::string> name) {
    stix::Common c;
    c.id = id;
    c.created = ts;
    c.modified = ts;
    c.name = std::move(name);
    return c;
}

bool is_acronym(std::string_view s) {
    return s.size() <= 4 && std::none_of(s.begin(), s.end(), [](char c) {
               return std::islower(static_cast<unsigned char>(c)) != 0;
           });
}

bool matches_at(std::string_view hay, std::size_t pos, std::string_view needle, bool case_sensitive) {
    if (pos + needle.size() > hay.size()) return false;
    const auto slice = hay.substr(pos, needle.size());
    return case_sensitive ? slice == needle : text::iequals(slice, needle);
}

bool word_start(std::string_view s, std::size_t pos) { return pos == 0 || !text::is_alnum(s[pos - 1]); }
bool word_end(std::string_view s, std::size_t pos) { return pos >= s.size() || !text::is_alnum(s[pos]); }

std::size_t gap(std::size_t b1, std::size_t e1, std::size_t b2, std::size_t e2) {
    if (e1 <= b2) return b2 - e1;
    if (e2 <= b1) return b1 - e2;
    return 0;
}

}  // namespace

std::string_view to_string(Attribution a) noexcept {
    return a == Attribution::confirmed ? "confirmed" : "suspected";
}

std::string_view to_string(EnrichmentWarning::Kind k) noexcept {
    switch (k) {
        case WarnKind::UnknownCountry: return "UnknownCountry";
        case WarnKind::UnknownRegion: return "UnknownRegion";
        case WarnKind::UnknownMotivation: return "UnknownMotivation";
        case WarnKind::CustomSector: return "CustomSector";
        case WarnKind::NonStandardSector: return "NonStandardSector";
        case WarnKind::MissingAttribution: return "MissingAttribution";
        case WarnKind::AttributionWithoutOrigin: return "AttributionWithoutOrigin";
    }
    return "UnknownCountry";
}

Json to_json(const EnrichmentRecord& r) {
    Json j = Json::object();
    j["group_key"] = r.group_key;
    if (r.origin_country) j["origin_country"] = *r.origin_country;
    if (r.origin_attribution) j["origin_attribution"] = to_string(*r.origin_attribution);
    j["target_countries"] = r.target_countries;
    j["target_regions"] = r.target_regions;
    j["target_sectors"] = r.target_sectors;
    if (r.primary_motivation) j["primary_motivation"] = *r.primary_motivation;
    j["secondary_motivations"] = r.secondary_motivations;
    return j;
}

void canonicalize(EnrichmentRecord& r, const Gazetteer& g, std::vector<EnrichmentWarning>& warnings) {
    auto warn = [&](WarnKind k, std::string v) { warnings.push_back({k, r.group_key, std::move(v)}); };

    if (r.origin_country) {
        if (auto c = canonical_country(*r.origin_country, g)) {
            r.origin_country = *c;
            if (!r.origin_attribution) {
                warn(WarnKind::MissingAttribution, *c);
                r.origin_attribution = Attribution::suspected;
            }
        } else {
            warn(WarnKind::UnknownCountry, *r.origin_country);
            r.origin_country.reset();
            r.origin_attribution.reset();
        }
    } else if (r.origin_attribution) {
        warn(WarnKind::AttributionWithoutOrigin, std::string(to_string(*r.origin_attribution)));
        r.origin_attribution.reset();
    }

    std::vector<std::string> countries;
    for (const auto& s : r.target_countries) {
        if (auto c = canonical_country(s, g)) countries.push_back(*c);
        else warn(WarnKind::UnknownCountry, s);
    }
    r.target_countries = std::move(countries);

    std::vector<std::string> regions;
    for (const auto& s : r.target_regions) {
        if (auto t = canonical_token(VocabKind::region, s, g, is_standard_region)) regions.push_back(*t);
        else warn(WarnKind::UnknownRegion, s);
    }
    r.target_regions = std::move(regions);

    std::vector<std::string> sectors;
    for (const auto& s : r.target_sectors) {
        if (auto t = g.lookup(VocabKind::sector, s)) {
            if (!is_standard_sector(*t)) warn(WarnKind::NonStandardSector, *t);
            sectors.push_back(*t);
            continue;
        }
        auto token = text::hyphenate(s);
        if (token.empty()) continue;
        if (!is_standard_sector(token)) warn(WarnKind::CustomSector, token);
        sectors.push_back(std::move(token));
    }
    r.target_sectors = std::move(sectors);

    if (r.primary_motivation) {
        auto t = canonical_token(VocabKind::motivation, *r.primary_motivation, g, is_standard_motivation);
        if (!t) warn(WarnKind::UnknownMotivation, *r.primary_motivation);
        r.primary_motivation = std::move(t);
    }
    std::vector<std::string> secondary;
    for (const auto& s : r.secondary_motivations) {
        if (auto t = canonical_token(VocabKind::motivation, s, g, is_standard_motivation)) {
            if (t != r.primary_motivation) secondary.push_back(*t);
        } else {
            warn(WarnKind::UnknownMotivation, s);
        }
    }
    r.secondary_motivations = std::move(secondary);

    dedupe_in_order(r.target_countries);
    dedupe_in_order(r.target_regions);
    dedupe_in_order(r.target_sectors);
    dedupe_in_order(r.secondary_motivations);
}

LoadedEnrichment load_enrichment(std::string_view document, const Gazetteer& g) {
    Json doc;
    try {
        doc = Json::parse(document);
    } catch (const Json::parse_error& e) {
        throw MalformedEnrichmentFile(e.what());
    }
    if (!doc.is_array()) throw MalformedEnrichmentFile("top level must be an array of records");

    LoadedEnrichment out;
    std::set<std::string> keys;
    for (const auto& item : doc) {
        if (!item.is_object()) throw MalformedEnrichmentFile("record is not an object");
        for (const auto& [key, value] : item.items())
            if (std::find(std::begin(kRecordKeys), std::end(kRecordKeys), key) == std::end(kRecordKeys))
                throw MalformedEnrichmentFile("unknown key \"" + key + "\"");

        EnrichmentRecord r;
        r.group_key = std::string(text::trim(opt_string(item, "group_key").value_or("")));
        if (r.group_key.empty()) throw MalformedEnrichmentFile("record without group_key");
        if (!keys.insert(text::fold(r.group_key)).second) throw DuplicateGroupKey(r.group_key);

        r.origin_country = opt_string(item, "origin_country");
        if (auto a = opt_string(item, "origin_attribution")) {
            const auto folded = text::fold(*a);
            if (folded == "suspected") r.origin_attribution = Attribution::suspected;
            else if (folded == "confirmed") r.origin_attribution = Attribution::confirmed;
            else throw MalformedEnrichmentFile("origin_attribution must be suspected or confirmed");
        }
        r.target_countries = string_list(item, "target_countries");
        r.target_regions = string_list(item, "target_regions");
        r.target_sectors = string_list(item, "target_sectors");
        r.primary_motivation = opt_string(item, "primary_motivation");
        r.secondary_motivations = string_list(item, "secondary_motivations");

        canonicalize(r, g, out.warnings);
        out.records.push_back(std::move(r));
    }
    return out;
}

StixId country_location_id(std::string_view code) {
    return StixId::make("location", uuid_v5(kEnrichmentNamespace, "location:country:" + std::string(code)));
}

StixId region_location_id(std::string_view region) {
    return StixId::make("location", uuid_v5(kEnrichmentNamespace, "location:region:" + std::string(region)));
}

StixId sector_identity_id(std::string_view sector) {
    return StixId::make("identity", uuid_v5(kEnrichmentNamespace, "identity:sector:" + std::string(sector)));
}

namespace {

// Mutable state of one apply run over a copy of the input bundle.
class Enricher {
public:
    Enricher(const stix::Bundle& b, const ApplyOptions& opts)
        : bundle_(b), ts_(stix::Timestamp::parse(opts.timestamp)) {
        for (std::size_t i = 0; i < bundle_.objects.size(); ++i) {
            const auto& o = bundle_.objects[i];
            ids_.insert(o.id_text());
            if (o.get_if<stix::IntrusionSet>()) position_.emplace(o.id_text(), i);
            if (const auto* loc = o.get_if<stix::Location>()) {
                if (loc->country && !loc->region) countries_.emplace(*loc->country, loc->common.id);
                if (loc->region && !loc->country) regions_.emplace(*loc->region, loc->common.id);
            } else if (const auto* ident = o.get_if<stix::Identity>()) {
                if (ident->identity_class == "class" && ident->sectors.size() == 1)
                    sectors_.emplace(ident->sectors.front(), ident->common.id);
            } else if (const auto* rel = o.get_if<stix::Relationship>()) {
                edges_.emplace(rel->type, rel->source_ref, rel->target_ref);
            }
        }
    }

    StixId country(const std::string& code) {
        if (auto it = countries_.find(code); it != countries_.end()) return it->second;
        const auto id = country_location_id(code);
        stix::Location loc{new_common(id, ts_, code), code, std::nullopt};
        add(std::move(loc));
        ++report.locations_created;
        countries_.emplace(code, id);
        return id;
    }

    StixId region(const std::string& token) {
        if (auto it = regions_.find(token); it != regions_.end()) return it->second;
        const auto id = region_location_id(token);
        stix::Location loc{new_common(id, ts_, token), std::nullopt, token};
        add(std::move(loc));
        ++report.locations_created;
        regions_.emplace(token, id);
        return id;
    }

    StixId sector(const std::string& token) {
        if (auto it = sectors_.find(token); it != sectors_.end()) return it->second;
        const auto id = sector_identity_id(token);
        stix::Identity ident{new_common(id, ts_, token), "class", {token}};
        add(std::move(ident));
        ++report.identities_created;
        sectors_.emplace(token, id);
        return id;
    }

    void relate(RelationshipType type, const StixId& src, const StixId& tgt, std::optional<int> confidence) {
        if (!edges_.emplace(type, src, tgt).second) return;
        const auto id = StixId::make(
            "relationship", uuid_v5(kEnrichmentNamespace, "relationship:" + std::string(to_string(type)) +
                                                              ":" + src.str() + ":" + tgt.str()));
        stix::Relationship rel{new_common(id, ts_, std::nullopt), type, src, tgt, confidence};
        add(std::move(rel));
        ++report.relationships_created;
    }

    void set_motivations(const StixId& group, const EnrichmentRecord& r) {
        if (!r.primary_motivation && r.secondary_motivations.empty()) return;
        auto& is = *bundle_.objects.at(position_.at(group.str())).get_if<stix::IntrusionSet>();
        auto primary = r.primary_motivation ? r.primary_motivation : is.primary_motivation;
        auto secondary = r.secondary_motivations.empty() ? is.secondary_motivations : r.secondary_motivations;
        if (primary) std::erase(secondary, *primary);
        if (primary == is.primary_motivation && secondary == is.secondary_motivations) return;
        is.primary_motivation = std::move(primary);
        is.secondary_motivations = std::move(secondary);
        ++report.motivations_set;
    }

    stix::Bundle take() { return std::move(bundle_); }

    EnrichmentReport report;

private:
    void add(stix::StixObject::Variant v) {
        stix::StixObject obj(std::move(v));
        ids_.insert(obj.id_text());
        bundle_.objects.push_back(std::move(obj));
    }

    stix::Bundle bundle_;
    stix::Timestamp ts_;
    std::set<std::string> ids_;
    std::map<std::string, std::size_t> position_;
    std::map<std::string, StixId> countries_;
    std::map<std::string, StixId> regions_;
    std::map<std::string, StixId> sectors_;
    std::set<std::tuple<RelationshipType, StixId, StixId>> edges_;
};

}  // namespace

ApplyResult apply_enrichment(const stix::Bundle& bundle, std::span<const EnrichmentRecord> records,
                             const ApplyOptions& options) {
    const auto graph = KnowledgeGraph::build(bundle);
    Enricher e(bundle, options);

    for (const auto& r : records) {
        std::optional<StixId> group;
        try {
            group = graph.resolve_group(r.group_key);
        } catch (const AmbiguousKey&) {
            e.report.groups_ambiguous.push_back(r.group_key);
            continue;
        }
        if (!group) {
            e.report.groups_unmatched.push_back(r.group_key);
            continue;
        }
        ++e.report.groups_matched;

        if (r.origin_country) {
            const int confidence = r.origin_attribution == Attribution::confirmed ? kConfirmedConfidence
                                                                                  : kSuspectedConfidence;
            e.relate(RelationshipType::originates_from, *group, e.country(*r.origin_country), confidence);
        }
        for (const auto& c : r.target_countries)
            e.relate(RelationshipType::targets, *group, e.country(c), std::nullopt);
        for (const auto& reg : r.target_regions)
            e.relate(RelationshipType::targets, *group, e.region(reg), std::nullopt);
        for (const auto& s : r.target_sectors)
            e.relate(RelationshipType::targets, *group, e.sector(s), std::nullopt);
        e.set_motivations(*group, r);
    }

    ApplyResult out{e.take(), std::move(e.report)};
    return out;
}

DraftRecord suggest_enrichment(const stix::IntrusionSet& group, const Gazetteer& g,
                               const SuggestOptions& options) {
    if (!group.common.description || text::trim(*group.common.description).empty())
        throw NoDescription(group.common.name.value_or(group.common.id.str()));
    const std::string_view desc = *group.common.description;

    struct Candidate {
        VocabKind kind;
        std::string surface;
        std::string token;
        bool case_sensitive;
    };
    std::vector<Candidate> candidates;
    for (auto kind : {VocabKind::country, VocabKind::region, VocabKind::sector, VocabKind::motivation})
        for (const auto& [surface, token] : g.table(kind))
            candidates.push_back({kind, surface, token, is_acronym(surface)});
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.surface.size() > b.surface.size(); });

    std::vector<Witness> hits;
    for (std::size_t i = 0; i < desc.size();) {
        if (!word_start(desc, i)) {
            ++i;
            continue;
        }
        const Candidate* best = nullptr;
        for (const auto& c : candidates) {
            if (matches_at(desc, i, c.surface, c.case_sensitive) && word_end(desc, i + c.surface.size())) {
                best = &c;
                break;
            }
        }
        if (best == nullptr) {
            ++i;
            continue;
        }
        hits.push_back({best->kind, best->token, i, i + best->surface.size()});
        i += best->surface.size();
    }

    std::vector<std::pair<std::size_t, std::size_t>> cues;
    for (const auto& cue : options.attribution_cues) {
        for (std::size_t pos = 0; pos + cue.size() <= desc.size(); ++pos)
            if (word_start(desc, pos) && matches_at(desc, pos, cue, false) && word_end(desc, pos + cue.size()))
                cues.emplace_back(pos, pos + cue.size());
    }
    auto near_cue = [&](const Witness& w) {
        return std::any_of(cues.begin(), cues.end(), [&](const auto& c) {
            return gap(w.begin, w.end, c.first, c.second) <= options.cue_window;
        });
    };

    DraftRecord draft;
    EnrichmentRecord& r = draft.record;
    r.group_key = stix::attack_id_of(group.common).value_or(group.common.name.value_or(group.common.id.str()));

    auto push = [&](std::vector<std::string>& list, const Witness& w) {
        if (std::find(list.begin(), list.end(), w.token) != list.end()) return;
        list.push_back(w.token);
        draft.witnesses.push_back(w);
    };

    for (const auto& w : hits) {
        switch (w.kind) {
            case VocabKind::country:
                if (near_cue(w)) {
                    if (!r.origin_country) {
                        r.origin_country = w.token;
                        r.origin_attribution = Attribution::suspected;
                        draft.witnesses.push_back(w);
                    }
                    break;
                }
                if (w.token != r.origin_country) push(r.target_countries, w);
                break;
            case VocabKind::region: push(r.target_regions, w); break;
            case VocabKind::sector: push(r.target_sectors, w); break;
            case VocabKind::motivation:
                if (!r.primary_motivation) {
                    r.primary_motivation = w.token;
                    draft.witnesses.push_back(w);
                } else if (w.token != r.primary_motivation) {
                    push(r.secondary_motivations, w);
                }
                break;
        }
    }
    if (r.origin_country) std::erase(r.target_countries, *r.origin_country);
    return draft;
}

}  // namespace groupkb
