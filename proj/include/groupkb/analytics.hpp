#pragma once

// Technique frequency across a set of groups, overlap tiers and the
// prioritized ordering that feeds the Navigator heatmap.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "groupkb/graph.hpp"

namespace groupkb {

struct TechniqueUsage {
    std::string attack_id;
    std::string technique_name;
    std::vector<std::string> groups;  // group attack ids, sorted, unique
    std::size_t count = 0;            // == groups.size()

    friend bool operator==(const TechniqueUsage&, const TechniqueUsage&) = default;
};

struct OverlapSummary {
    std::size_t n_groups = 0;
    std::map<std::size_t, std::vector<std::string>> tiers;  // count -> attack ids
    std::size_t total_techniques = 0;
};

// One entry per technique used by at least one of `groups`, ordered by
// (count desc, attack id asc). With rollup, a sub-technique also credits its
// parent T#### once per group. Throws UnknownId / NotAGroup.
std::vector<TechniqueUsage> techniques_of_groups(const KnowledgeGraph& g,
                                                 std::span<const stix::StixId> groups, bool rollup);

// Throws CountExceedsGroups when a usage count is outside [1, n_groups].
OverlapSummary overlap_summary(std::span<const TechniqueUsage> usages, std::size_t n_groups);

// Attack ids ordered by (count desc, attack id asc).
std::vector<std::string> prioritize(std::span<const TechniqueUsage> usages);

}  // namespace groupkb
