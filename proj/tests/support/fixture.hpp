#pragma once

// The enhanced fixture bundle: attack-fixture.json plus fixture_records.json.

#include "groupkb/enrichment.hpp"
#include "groupkb/graph.hpp"
#include "groupkb/stix.hpp"
#include "support.hpp"

namespace support {

inline const groupkb::stix::Bundle& base_fixture() {
    static const auto b = groupkb::stix::parse_bundle(fixture_text("attack-fixture.json"));
    return b;
}

inline const groupkb::stix::Bundle& enhanced_fixture() {
    static const auto b = [] {
        auto recs = groupkb::load_enrichment(fixture_text("fixture_records.json")).records;
        return groupkb::apply_enrichment(base_fixture(), recs).bundle;
    }();
    return b;
}

inline const groupkb::KnowledgeGraph& enhanced_graph() {
    static const auto g = groupkb::build_graph(enhanced_fixture());
    return g;
}

}  // namespace support
