#pragma once

// Immutable indexed view of an (enhanced) bundle: the evaluation substrate
// for queries and analytics. Revoked and deprecated objects never enter it.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "groupkb/stix.hpp"

namespace groupkb {

enum class Direction { out, in };

struct GraphWarning {
    enum class Kind {
        DanglingEdge,     // endpoint not in the bundle at all
        ExcludedEndpoint, // endpoint revoked, deprecated or untyped
    };
    Kind kind;
    std::string relationship_id;
    std::string detail;
};

std::string_view to_string(GraphWarning::Kind k) noexcept;

struct Origin {
    std::string country;
    std::optional<int> confidence;

    friend bool operator==(const Origin&, const Origin&) = default;
};

struct GroupView {
    stix::StixId id;
    std::string name;
    std::string attack_id;
    std::vector<std::string> aliases;
    std::optional<Origin> origin;
    std::vector<std::string> target_countries;
    std::vector<std::string> target_regions;
    std::vector<std::string> target_sectors;
    std::optional<std::string> primary_motivation;
    std::vector<std::string> secondary_motivations;
    std::vector<std::string> techniques;  // attack ids, ascending
    std::vector<std::string> software;    // attack ids, ascending
};

class KnowledgeGraph {
public:
    // Build from scratch; never throws on content problems, which are
    // reported through warnings().
    static KnowledgeGraph build(const stix::Bundle& b);

    std::size_t size() const noexcept { return objects_.size(); }
    bool contains(const stix::StixId& id) const { return objects_.contains(id); }
    const stix::StixObject* find(const stix::StixId& id) const;

    // Sorted ids of a given object type.
    const std::vector<stix::StixId>& ids_of_type(std::string_view type) const;
    // All intrusion sets in the graph, sorted by id.
    const std::vector<stix::StixId>& groups() const { return ids_of_type("intrusion-set"); }

    // Sorted, duplicate-free. Throws UnknownId.
    std::vector<stix::StixId> neighbors(const stix::StixId& id, stix::RelationshipType rel,
                                        Direction dir) const;

    // The relationship objects behind (source, rel) edges.
    std::vector<const stix::Relationship*> edges_from(const stix::StixId& source,
                                                      stix::RelationshipType rel) const;

    // G#### first, then exact name, then alias; all case-insensitive.
    // Throws AmbiguousKey when the first matching tier names several groups.
    std::optional<stix::StixId> resolve_group(std::string_view key) const;

    // Throws UnknownId / NotAGroup.
    GroupView group_view(const stix::StixId& id) const;

    // Lookup helpers used by query evaluation.
    std::vector<stix::StixId> locations_with_country(std::string_view code) const;
    std::vector<stix::StixId> locations_with_region(std::string_view region) const;
    std::vector<stix::StixId> identities_with_sector(std::string_view sector) const;
    std::optional<stix::StixId> technique(std::string_view attack_id) const;
    std::optional<stix::StixId> software(std::string_view attack_id_or_name) const;

    const std::vector<GraphWarning>& warnings() const noexcept { return warnings_; }

    // Flattened key -> ids index over folded G####, names and aliases.
    std::map<std::string, std::vector<stix::StixId>> name_index() const;

private:
    using EdgeKey = std::pair<stix::StixId, stix::RelationshipType>;
    struct Edge {
        stix::StixId other;
        stix::StixId relationship;
    };

    std::map<stix::StixId, stix::StixObject> objects_;
    std::map<std::string, std::vector<stix::StixId>, std::less<>> by_type_;
    std::map<EdgeKey, std::vector<Edge>> out_edges_;
    std::map<EdgeKey, std::vector<Edge>> in_edges_;
    std::map<std::string, std::vector<stix::StixId>> by_group_code_;
    std::map<std::string, std::vector<stix::StixId>> by_name_;
    std::map<std::string, std::vector<stix::StixId>> by_alias_;
    std::map<std::string, std::vector<stix::StixId>> by_country_;
    std::map<std::string, std::vector<stix::StixId>> by_region_;
    std::map<std::string, std::vector<stix::StixId>> by_sector_;
    std::map<std::string, stix::StixId> techniques_;
    std::map<std::string, stix::StixId> software_;  // attack id and folded name
    std::vector<GraphWarning> warnings_;
};

// attack_id_of that yields nothing instead of throwing on conflicting ids.
std::optional<std::string> safe_attack_id(const stix::Common& c) noexcept;

inline KnowledgeGraph build_graph(const stix::Bundle& b) { return KnowledgeGraph::build(b); }

}  // namespace groupkb
