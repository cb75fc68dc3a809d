#include "groupkb/graph.hpp"

#include <algorithm>
#include <set>

#include "groupkb/error.hpp"
#include "text.hpp"

namespace groupkb {

using stix::RelationshipType;
using stix::StixId;
using stix::StixObject;

namespace {

void sort_unique(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void add_unique(std::map<std::string, std::vector<StixId>>& index, std::string key, const StixId& id) {
    auto& ids = index[std::move(key)];
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
}

std::vector<StixId> lookup(const std::map<std::string, std::vector<StixId>>& index,
                           const std::string& key) {
    auto it = index.find(key);
    return it == index.end() ? std::vector<StixId>{} : it->second;
}

}  // namespace

std::optional<std::string> safe_attack_id(const stix::Common& c) noexcept {
    try {
        return stix::attack_id_of(c);
    } catch (...) {
        return std::nullopt;
    }
}

std::string_view to_string(GraphWarning::Kind k) noexcept {
    return k == GraphWarning::Kind::DanglingEdge ? "DanglingEdge" : "ExcludedEndpoint";
}

KnowledgeGraph KnowledgeGraph::build(const stix::Bundle& b) {
    KnowledgeGraph g;
    std::set<std::string> present;  // every id in the bundle, indexed or not
    std::vector<const stix::Relationship*> relationships;

    for (const auto& o : b.objects) {
        present.insert(o.id_text());
        const auto* common = o.common();
        if (common == nullptr || common->is_revoked_or_deprecated()) continue;
        if (const auto* rel = o.get_if<stix::Relationship>()) {
            relationships.push_back(rel);
            continue;
        }
        if (g.objects_.contains(common->id)) continue;
        const StixId id = common->id;
        g.objects_.emplace(id, o);

        if (const auto* is = o.get_if<stix::IntrusionSet>()) {
            if (auto code = safe_attack_id(*common)) add_unique(g.by_group_code_, text::fold(*code), id);
            if (common->name) add_unique(g.by_name_, text::fold(*common->name), id);
            for (const auto& a : is->aliases) add_unique(g.by_alias_, text::fold(a), id);
        } else if (const auto* ap = o.get_if<stix::AttackPattern>()) {
            g.techniques_.emplace(ap->attack_id, id);
        } else if (const auto* sw = o.get_if<stix::Software>()) {
            g.software_.emplace(sw->attack_id, id);
            if (common->name) g.software_.emplace(text::fold(*common->name), id);
        } else if (const auto* loc = o.get_if<stix::Location>()) {
            if (loc->country) add_unique(g.by_country_, text::upper(*loc->country), id);
            if (loc->region) add_unique(g.by_region_, text::fold(*loc->region), id);
        } else if (const auto* ident = o.get_if<stix::Identity>()) {
            for (const auto& s : ident->sectors) add_unique(g.by_sector_, text::fold(s), id);
        }
    }

    for (const auto* rel : relationships) {
        const StixId& rid = rel->common.id;
        if (g.objects_.contains(rid)) continue;
        bool ok = true;
        for (const StixId* end : {&rel->source_ref, &rel->target_ref}) {
            if (g.objects_.contains(*end)) continue;
            ok = false;
            if (present.contains(end->str()))
                g.warnings_.push_back({GraphWarning::Kind::ExcludedEndpoint, rid.str(), end->str()});
            else
                g.warnings_.push_back({GraphWarning::Kind::DanglingEdge, rid.str(), end->str()});
        }
        if (!ok) continue;
        g.objects_.emplace(rid, StixObject(*rel));
        g.out_edges_[{rel->source_ref, rel->type}].push_back({rel->target_ref, rid});
        g.in_edges_[{rel->target_ref, rel->type}].push_back({rel->source_ref, rid});
    }

    for (auto* edges : {&g.out_edges_, &g.in_edges_})
        for (auto& [key, list] : *edges)
            std::sort(list.begin(), list.end(), [](const Edge& a, const Edge& b) {
                return a.other != b.other ? a.other < b.other : a.relationship < b.relationship;
            });

    for (const auto& [id, obj] : g.objects_) g.by_type_[obj.type()].push_back(id);
    return g;
}

const StixObject* KnowledgeGraph::find(const StixId& id) const {
    auto it = objects_.find(id);
    return it == objects_.end() ? nullptr : &it->second;
}

const std::vector<StixId>& KnowledgeGraph::ids_of_type(std::string_view type) const {
    static const std::vector<StixId> kEmpty;
    auto it = by_type_.find(type);
    return it == by_type_.end() ? kEmpty : it->second;
}

std::vector<StixId> KnowledgeGraph::neighbors(const StixId& id, RelationshipType rel, Direction dir) const {
    if (!objects_.contains(id)) throw UnknownId(id.str());
    const auto& index = dir == Direction::out ? out_edges_ : in_edges_;
    std::vector<StixId> out;
    if (auto it = index.find({id, rel}); it != index.end())
        for (const auto& e : it->second)
            if (out.empty() || out.back() != e.other) out.push_back(e.other);
    return out;
}

std::vector<const stix::Relationship*> KnowledgeGraph::edges_from(const StixId& source,
                                                                  RelationshipType rel) const {
    std::vector<const stix::Relationship*> out;
    if (auto it = out_edges_.find({source, rel}); it != out_edges_.end())
        for (const auto& e : it->second)
            out.push_back(objects_.at(e.relationship).get_if<stix::Relationship>());
    return out;
}

std::optional<StixId> KnowledgeGraph::resolve_group(std::string_view key) const {
    const std::string folded = text::fold(text::trim(key));
    if (folded.empty()) return std::nullopt;
    for (const auto* tier : {&by_group_code_, &by_name_, &by_alias_}) {
        auto it = tier->find(folded);
        if (it == tier->end()) continue;
        if (it->second.size() > 1) throw AmbiguousKey(std::string(key));
        return it->second.front();
    }
    return std::nullopt;
}

GroupView KnowledgeGraph::group_view(const StixId& id) const {
    const auto* obj = find(id);
    if (obj == nullptr) throw UnknownId(id.str());
    const auto* is = obj->get_if<stix::IntrusionSet>();
    if (is == nullptr) throw NotAGroup(id.str());

    GroupView v;
    v.id = id;
    v.name = is->common.name.value_or("");
    v.attack_id = safe_attack_id(is->common).value_or("");
    v.aliases = is->aliases;
    v.primary_motivation = is->primary_motivation;
    v.secondary_motivations = is->secondary_motivations;

    for (const auto* rel : edges_from(id, RelationshipType::originates_from)) {
        const auto* loc = find(rel->target_ref)->get_if<stix::Location>();
        if (loc == nullptr || !loc->country) continue;
        Origin candidate{*loc->country, rel->confidence};
        if (!v.origin || candidate.confidence > v.origin->confidence ||
            (candidate.confidence == v.origin->confidence && candidate.country < v.origin->country))
            v.origin = candidate;
    }

    for (const auto& target : neighbors(id, RelationshipType::targets, Direction::out)) {
        const auto* t = find(target);
        if (const auto* loc = t->get_if<stix::Location>()) {
            if (loc->country) v.target_countries.push_back(*loc->country);
            if (loc->region) v.target_regions.push_back(*loc->region);
        } else if (const auto* ident = t->get_if<stix::Identity>()) {
            v.target_sectors.insert(v.target_sectors.end(), ident->sectors.begin(), ident->sectors.end());
        }
    }

    for (const auto& target : neighbors(id, RelationshipType::uses, Direction::out)) {
        const auto* t = find(target);
        if (const auto* ap = t->get_if<stix::AttackPattern>()) v.techniques.push_back(ap->attack_id);
        else if (const auto* sw = t->get_if<stix::Software>()) v.software.push_back(sw->attack_id);
    }

    sort_unique(v.target_countries);
    sort_unique(v.target_regions);
    sort_unique(v.target_sectors);
    sort_unique(v.techniques);
    sort_unique(v.software);
    return v;
}

std::vector<StixId> KnowledgeGraph::locations_with_country(std::string_view code) const {
    return lookup(by_country_, text::upper(code));
}

std::vector<StixId> KnowledgeGraph::locations_with_region(std::string_view region) const {
    return lookup(by_region_, text::fold(region));
}

std::vector<StixId> KnowledgeGraph::identities_with_sector(std::string_view sector) const {
    return lookup(by_sector_, text::fold(sector));
}

std::optional<StixId> KnowledgeGraph::technique(std::string_view attack_id) const {
    auto it = techniques_.find(std::string(attack_id));
    if (it == techniques_.end()) return std::nullopt;
    return it->second;
}

std::optional<StixId> KnowledgeGraph::software(std::string_view key) const {
    if (auto it = software_.find(std::string(key)); it != software_.end()) return it->second;
    if (auto it = software_.find(text::fold(key)); it != software_.end()) return it->second;
    return std::nullopt;
}

std::map<std::string, std::vector<StixId>> KnowledgeGraph::name_index() const {
    std::map<std::string, std::vector<StixId>> out;
    for (const auto* tier : {&by_group_code_, &by_name_, &by_alias_})
        for (const auto& [key, ids] : *tier)
            for (const auto& id : ids) add_unique(out, key, id);
    return out;
}

}  // namespace groupkb
