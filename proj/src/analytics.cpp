#include "groupkb/analytics.hpp"

#include <algorithm>
#include <set>

#include "groupkb/error.hpp"

namespace groupkb {

namespace {

bool before(const TechniqueUsage& a, const TechniqueUsage& b) {
    return a.count != b.count ? a.count > b.count : a.attack_id < b.attack_id;
}

}  // namespace

std::vector<TechniqueUsage> techniques_of_groups(const KnowledgeGraph& g,
                                                 std::span<const stix::StixId> groups, bool rollup) {
    std::map<std::string, std::set<std::string>> credited;
    const std::set<stix::StixId> unique(groups.begin(), groups.end());
    for (const auto& id : unique) {
        const GroupView view = g.group_view(id);
        const std::string label = view.attack_id.empty() ? view.id.str() : view.attack_id;
        for (const auto& t : view.techniques) {
            credited[t].insert(label);
            if (rollup && t.size() > 5) credited[t.substr(0, 5)].insert(label);
        }
    }

    std::vector<TechniqueUsage> out;
    out.reserve(credited.size());
    for (auto& [attack_id, set] : credited) {
        TechniqueUsage u;
        u.attack_id = attack_id;
        if (auto tid = g.technique(attack_id))
            u.technique_name = g.find(*tid)->common()->name.value_or("");
        u.groups.assign(set.begin(), set.end());
        u.count = u.groups.size();
        out.push_back(std::move(u));
    }
    std::stable_sort(out.begin(), out.end(), before);
    return out;
}

OverlapSummary overlap_summary(std::span<const TechniqueUsage> usages, std::size_t n_groups) {
    OverlapSummary s;
    s.n_groups = n_groups;
    std::set<std::string> seen;
    for (const auto& u : usages) {
        if (u.count == 0 || u.count > n_groups) throw CountExceedsGroups(u.attack_id, u.count, n_groups);
        if (!seen.insert(u.attack_id).second) continue;
        s.tiers[u.count].push_back(u.attack_id);
    }
    for (auto& [count, ids] : s.tiers) std::sort(ids.begin(), ids.end());
    s.total_techniques = seen.size();
    return s;
}

std::vector<std::string> prioritize(std::span<const TechniqueUsage> usages) {
    std::vector<TechniqueUsage> sorted(usages.begin(), usages.end());
    std::stable_sort(sorted.begin(), sorted.end(), before);
    std::vector<std::string> out;
    out.reserve(sorted.size());
    for (auto& u : sorted) out.push_back(std::move(u.attack_id));
    return out;
}

}  // namespace groupkb
