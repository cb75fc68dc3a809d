#include <doctest.h>

#include "groupkb/enrichment.hpp"
#include "groupkb/error.hpp"
#include "groupkb/graph.hpp"
#include "fixture.hpp"

using namespace groupkb;
using stix::RelationshipType;
using support::enhanced_fixture;

namespace {

const stix::Bundle& enhanced() { return enhanced_fixture(); }

}  // namespace

TEST_SUITE("graph") {
    TEST_CASE("revoked and deprecated objects stay out") {
        const auto g = build_graph(enhanced());
        CHECK(g.groups().size() == 7);
        CHECK_FALSE(g.resolve_group("Retired Group"));
        CHECK_FALSE(g.technique("T1999"));
        CHECK(g.technique("T1078"));
        CHECK(g.warnings().size() == 2);
        for (const auto& w : g.warnings()) CHECK(w.kind == GraphWarning::Kind::ExcludedEndpoint);
    }

    TEST_CASE("group keys resolve by code, name and alias") {
        const auto g = build_graph(enhanced());
        const auto id = g.resolve_group("G0016");
        REQUIRE(id);
        CHECK(g.resolve_group("apt29") == id);
        CHECK(g.resolve_group("NOBELIUM") == id);
        CHECK(g.resolve_group("cozy bear") == id);
        CHECK_FALSE(g.resolve_group("Nobody"));
    }

    TEST_CASE("ambiguous aliases") {
        using support::Json;
        Json doc = Json::parse(support::fixture_text("attack-fixture.json"));
        for (auto& o : doc["objects"])
            if (o["type"] == "intrusion-set" && (o["name"] == "APT28" || o["name"] == "APT3"))
                o["aliases"].push_back("Shared Alias");
        const auto g = build_graph(stix::parse_bundle(doc.dump()));
        CHECK_THROWS_AS(g.resolve_group("shared alias"), AmbiguousKey);
    }

    TEST_CASE("group view collects neighbours") {
        const auto g = build_graph(enhanced());
        const auto v = g.group_view(*g.resolve_group("Dragonfly 2.0"));
        CHECK(v.attack_id == "G0074");
        CHECK(v.techniques ==
              std::vector<std::string>{"T1003", "T1110", "T1133", "T1505.003", "T1566.001", "T1566.002"});
        CHECK(v.software == std::vector<std::string>{"S0002"});
        CHECK(v.target_sectors == std::vector<std::string>{"energy", "government"});
        CHECK_THROWS_AS(g.group_view(*g.technique("T1078")), NotAGroup);
        CHECK_THROWS_AS(g.group_view(stix::StixId::parse("intrusion-set--00000000-0000-4000-8000-00000000dead")),
                        UnknownId);
    }

    TEST_CASE("in-edges mirror out-edges") {
        const auto g = build_graph(enhanced());
        for (auto rel : {RelationshipType::uses, RelationshipType::originates_from, RelationshipType::targets}) {
            for (const auto& type : {"intrusion-set", "malware", "tool", "attack-pattern", "location", "identity"}) {
                for (const auto& a : g.ids_of_type(type)) {
                    for (const auto& b : g.neighbors(a, rel, Direction::out)) {
                        const auto back = g.neighbors(b, rel, Direction::in);
                        CHECK(std::binary_search(back.begin(), back.end(), a));
                    }
                    for (const auto& b : g.neighbors(a, rel, Direction::in)) {
                        const auto fwd = g.neighbors(b, rel, Direction::out);
                        CHECK(std::binary_search(fwd.begin(), fwd.end(), a));
                    }
                }
            }
        }
    }

    TEST_CASE("group views agree with a raw JSON scan") {
        const auto raw = support::raw_groups(enhanced().to_json());
        const auto g = build_graph(enhanced());
        REQUIRE(raw.size() == g.groups().size());
        for (const auto& id : g.groups()) {
            const auto v = g.group_view(id);
            const auto& r = raw.at(id.str());
            CHECK(std::set<std::string>(v.techniques.begin(), v.techniques.end()) == r.techniques);
            CHECK(std::set<std::string>(v.target_countries.begin(), v.target_countries.end()) == r.target_countries);
            CHECK(std::set<std::string>(v.target_sectors.begin(), v.target_sectors.end()) == r.target_sectors);
            if (v.origin) CHECK(r.origins.contains(v.origin->country));
            else CHECK(r.origins.empty());
        }
    }

    TEST_CASE("neighbors of an unknown id throw") {
        const auto g = build_graph(enhanced());
        CHECK_THROWS_AS(g.neighbors(stix::StixId::parse("location--00000000-0000-4000-8000-00000000dead"),
                                    RelationshipType::targets, Direction::in),
                        UnknownId);
    }

    TEST_CASE("first duplicate wins") {
        using support::Json;
        Json doc = Json::parse(support::fixture_text("attack-fixture.json"));
        Json copy;
        for (const auto& o : doc["objects"])
            if (o["type"] == "intrusion-set" && o["name"] == "APT28") copy = o;
        copy["name"] = "Impostor";
        doc["objects"].push_back(copy);
        const auto g = build_graph(stix::parse_bundle(doc.dump()));
        CHECK(g.group_view(*g.resolve_group("G0007")).name == "APT28");
        CHECK_FALSE(g.resolve_group("Impostor"));
    }
}
