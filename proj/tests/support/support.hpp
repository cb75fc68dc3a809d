#pragma once

// Fixture loading and oracles that read raw JSON directly, without going
// through the library's parser, graph or evaluator.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace support {

using Json = nlohmann::json;

inline std::string data_path(const std::string& name) { return std::string(GROUPKB_TEST_DATA) + "/" + name; }

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string fixture_text(const std::string& name) { return read_text(data_path(name)); }

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Per-type object counts from a regex scan of the raw text. Relies on the
// "type" key appearing only on STIX objects and the bundle itself.
inline std::map<std::string, std::size_t> scan_type_counts(const std::string& text) {
    std::map<std::string, std::size_t> counts;
    static const std::regex re(R"re("type"\s*:\s*"([^"]+)")re");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it)
        ++counts[(*it)[1].str()];
    if (auto b = counts.find("bundle"); b != counts.end() && --b->second == 0) counts.erase(b);
    return counts;
}

// ---- brute-force group facts -------------------------------------------

struct RawGroup {
    std::string id;
    std::string attack_id;
    std::string name;
    std::set<std::string> names;  // folded name, aliases, attack id
    std::set<std::string> origins;
    std::set<std::string> target_countries;
    std::set<std::string> target_regions;
    std::set<std::string> target_sectors;
    std::set<std::string> motivations;  // folded
    std::set<std::string> techniques;
    std::set<std::string> software;  // attack ids and folded names
};

inline bool retired(const Json& o) {
    return o.value("revoked", false) || o.value("x_mitre_deprecated", false);
}

inline std::string mitre_id(const Json& o) {
    if (auto refs = o.find("external_references"); refs != o.end())
        for (const auto& r : *refs)
            if (r.value("source_name", "") == "mitre-attack" && r.contains("external_id"))
                return r["external_id"].get<std::string>();
    return "";
}

inline std::map<std::string, RawGroup> raw_groups(const Json& bundle) {
    std::map<std::string, Json> by_id;
    for (const auto& o : bundle["objects"])
        if (o.contains("id") && !by_id.contains(o["id"].get<std::string>()) && !retired(o))
            by_id.emplace(o["id"].get<std::string>(), o);

    std::map<std::string, RawGroup> groups;
    for (const auto& [id, o] : by_id) {
        if (o["type"] != "intrusion-set") continue;
        RawGroup g;
        g.id = id;
        g.attack_id = mitre_id(o);
        g.name = o.value("name", "");
        g.names.insert(lower(g.name));
        if (!g.attack_id.empty()) g.names.insert(lower(g.attack_id));
        for (const auto& a : o.value("aliases", Json::array())) g.names.insert(lower(a.get<std::string>()));
        if (o.contains("primary_motivation")) g.motivations.insert(lower(o["primary_motivation"]));
        for (const auto& m : o.value("secondary_motivations", Json::array())) g.motivations.insert(lower(m));
        groups.emplace(id, std::move(g));
    }
    for (const auto& [id, r] : by_id) {
        if (r["type"] != "relationship") continue;
        auto src = groups.find(r.value("source_ref", ""));
        auto tgt = by_id.find(r.value("target_ref", ""));
        if (src == groups.end() || tgt == by_id.end()) continue;
        RawGroup& g = src->second;
        const Json& t = tgt->second;
        const std::string kind = r.value("relationship_type", "");
        const std::string ttype = t["type"];
        if (kind == "originates-from" && ttype == "location" && t.contains("country")) {
            g.origins.insert(t["country"]);
        } else if (kind == "targets" && ttype == "location") {
            if (t.contains("country")) g.target_countries.insert(t["country"]);
            if (t.contains("region")) g.target_regions.insert(lower(t["region"]));
        } else if (kind == "targets" && ttype == "identity") {
            for (const auto& s : t.value("sectors", Json::array())) g.target_sectors.insert(lower(s));
        } else if (kind == "uses" && ttype == "attack-pattern") {
            g.techniques.insert(mitre_id(t));
        } else if (kind == "uses" && (ttype == "malware" || ttype == "tool")) {
            g.software.insert(mitre_id(t));
            g.software.insert(lower(t.value("name", "")));
        }
    }
    return groups;
}

// ---- query ASTs evaluated per group -------------------------------------

struct Pred {
    std::string field;  // query field name
    std::string value;  // canonical value
};

struct Ast {
    enum Kind { pred, conj, disj, neg } kind;
    Pred p;
    std::shared_ptr<const Ast> a, b;
};
using AstPtr = std::shared_ptr<const Ast>;

inline AstPtr leaf(Pred p) { return std::make_shared<Ast>(Ast{Ast::pred, std::move(p), nullptr, nullptr}); }
inline AstPtr conj(AstPtr a, AstPtr b) { return std::make_shared<Ast>(Ast{Ast::conj, {}, a, b}); }
inline AstPtr disj(AstPtr a, AstPtr b) { return std::make_shared<Ast>(Ast{Ast::disj, {}, a, b}); }
inline AstPtr neg(AstPtr a) { return std::make_shared<Ast>(Ast{Ast::neg, {}, a, nullptr}); }

inline std::string to_query(const Ast& e) {
    switch (e.kind) {
        case Ast::pred: return e.p.field + " == \"" + e.p.value + "\"";
        case Ast::conj: return "(" + to_query(*e.a) + " AND " + to_query(*e.b) + ")";
        case Ast::disj: return "(" + to_query(*e.a) + " OR " + to_query(*e.b) + ")";
        case Ast::neg: return "NOT " + to_query(*e.a);
    }
    return {};
}

inline bool holds(const Pred& p, const RawGroup& g) {
    const std::string v = lower(p.value);
    auto in = [&](const std::set<std::string>& s, const std::string& x) { return s.contains(x); };
    if (p.field == "OriginatesFrom") return in(g.origins, p.value);
    if (p.field == "TargetCountry") return in(g.target_countries, p.value);
    if (p.field == "TargetRegion") return in(g.target_regions, v);
    if (p.field == "TargetSector") return in(g.target_sectors, v);
    if (p.field == "Motivation") return in(g.motivations, v);
    if (p.field == "UsesTechnique") return in(g.techniques, p.value);
    if (p.field == "UsesSoftware") return in(g.software, p.value) || in(g.software, v);
    if (p.field == "Name") return in(g.names, v);
    throw std::logic_error("unknown field " + p.field);
}

inline bool holds(const Ast& e, const RawGroup& g) {
    switch (e.kind) {
        case Ast::pred: return holds(e.p, g);
        case Ast::conj: return holds(*e.a, g) && holds(*e.b, g);
        case Ast::disj: return holds(*e.a, g) || holds(*e.b, g);
        case Ast::neg: return !holds(*e.a, g);
    }
    return false;
}

inline std::set<std::string> brute_force(const Ast& e, const std::map<std::string, RawGroup>& groups) {
    std::set<std::string> out;
    for (const auto& [id, g] : groups)
        if (holds(e, g)) out.insert(id);
    return out;
}

// Every AST of depth <= max_depth over the given leaves: a leaf has depth 1,
// NOT/AND/OR add one to their deepest child.
inline std::vector<AstPtr> all_asts(const std::vector<Pred>& leaves, int max_depth) {
    std::vector<std::vector<AstPtr>> by_depth(static_cast<std::size_t>(max_depth) + 1);
    for (const auto& p : leaves) by_depth[1].push_back(leaf(p));
    std::vector<AstPtr> upto(by_depth[1]);
    for (int d = 2; d <= max_depth; ++d) {
        const std::vector<AstPtr> prev_all = upto;
        const auto& prev = by_depth[static_cast<std::size_t>(d - 1)];
        auto& cur = by_depth[static_cast<std::size_t>(d)];
        for (const auto& a : prev) cur.push_back(neg(a));
        for (const auto& a : prev_all)
            for (const auto& b : prev_all) {
                const bool deep = std::find(prev.begin(), prev.end(), a) != prev.end() ||
                                  std::find(prev.begin(), prev.end(), b) != prev.end();
                if (!deep) continue;
                cur.push_back(conj(a, b));
                cur.push_back(disj(a, b));
            }
        upto.insert(upto.end(), cur.begin(), cur.end());
    }
    return upto;
}

// ---- technique frequency oracle ------------------------------------------

// technique -> groups, straight from raw facts.
inline std::map<std::string, std::set<std::string>> technique_histogram(
    const std::map<std::string, RawGroup>& groups, const std::set<std::string>& selected) {
    std::map<std::string, std::set<std::string>> h;
    for (const auto& id : selected) {
        const auto& g = groups.at(id);
        for (const auto& t : g.techniques) h[t].insert(g.attack_id);
    }
    return h;
}

}  // namespace support
