// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance                 run every criterion; exit 1 if any failed
//   acceptance --criterion N   run one; exit 77 when it was skipped
//
// ATTCK_V9_BUNDLE=<path> points criteria 2 and 6 at the real enterprise bundle.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <string>

#include "fixture.hpp"
#include "groupkb/analytics.hpp"
#include "groupkb/enrichment.hpp"
#include "groupkb/graph.hpp"
#include "groupkb/navigator.hpp"
#include "groupkb/query.hpp"
#include "groupkb/stix.hpp"

using namespace groupkb;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances.
constexpr double kGoldenQuerySeconds = 1.0;
constexpr double kRealIngestSeconds = 5.0;
constexpr int kIdempotencyTrials = 100;
constexpr int kDedupTrials = 200;
constexpr int kAstDepth = 3;
constexpr int kOverlapSubsets = 100;
constexpr unsigned kSeed = 20210429;

const char* kRussiaGovUs =
    "SELECT * FROM GroupsKnowledgeBase WHERE OriginatesFrom == \"Russian Federation\" AND "
    "TargetSector == \"Government\" AND TargetCountry == \"United States\"";

enum class Status { pass, fail, skip };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome pass(std::string d) { return {Status::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::fail, std::move(d)}; }
Outcome skip(std::string d) { return {Status::skip, std::move(d)}; }

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<EnrichmentRecord> fixture_records() {
    return load_enrichment(support::fixture_text("fixture_records.json")).records;
}

std::set<std::string> id_strings(const std::vector<stix::StixId>& ids) {
    std::set<std::string> out;
    for (const auto& id : ids) out.insert(id.str());
    return out;
}

const char* real_bundle_path() {
    const char* p = std::getenv("ATTCK_V9_BUNDLE");
    return p && *p ? p : nullptr;
}

// ---- 1 --------------------------------------------------------------------

Outcome golden_query() {
    const auto t0 = Clock::now();
    const auto base = stix::parse_bundle(support::fixture_text("attack-fixture.json"));
    const auto enhanced = apply_enrichment(base, fixture_records()).bundle;
    const auto g = build_graph(enhanced);
    const auto r = query::evaluate(*query::parse_query(kRussiaGovUs), g);
    const double secs = seconds_since(t0);

    const std::vector<std::string> want = {"APT28", "APT29", "Dragonfly 2.0"};
    if (r.names != want) {
        std::string got;
        for (const auto& n : r.names) got += n + ";";
        return fail("got " + got);
    }
    // Every decoy must fail exactly one of the three predicates.
    const auto raw = support::raw_groups(enhanced.to_json());
    int decoys = 0;
    for (const auto& [id, grp] : raw) {
        if (std::find(want.begin(), want.end(), grp.name) != want.end()) continue;
        const int failed = !grp.origins.contains("RU") + !grp.target_sectors.contains("government") +
                           !grp.target_countries.contains("US");
        if (failed == 1) ++decoys;
    }
    if (decoys < 3) return fail("only " + std::to_string(decoys) + " single-predicate decoys");
    if (secs >= kGoldenQuerySeconds) return fail("took " + std::to_string(secs) + " s");
    return pass("{APT28, APT29, Dragonfly 2.0}; " + std::to_string(decoys) + " decoys; " +
                std::to_string(secs) + " s");
}

// ---- 2 --------------------------------------------------------------------

Outcome real_ingest() {
    const char* path = real_bundle_path();
    if (!path) return skip("ATTCK_V9_BUNDLE not set; the real v9 bundle is not available offline");
    std::string text;
    try {
        text = support::read_text(path);
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    const auto t0 = Clock::now();
    stix::Bundle b;
    try {
        b = stix::parse_bundle(text);
    } catch (const std::exception& e) {
        return fail(std::string("parse: ") + e.what());
    }
    const auto g = build_graph(b);
    const double secs = seconds_since(t0);

    std::size_t fatal = 0, other = 0;
    for (const auto& v : stix::validate(b)) {
        const bool is_fatal = v.kind == stix::ViolationKind::MalformedObject ||
                              v.kind == stix::ViolationKind::WrongSpecVersion ||
                              v.kind == stix::ViolationKind::MalformedCountryCode;
        (is_fatal ? fatal : other)++;
    }
    std::map<std::string, std::size_t> parsed;
    for (const auto& o : b.objects) ++parsed[o.type()];
    const bool counts_ok = parsed == support::scan_type_counts(text);

    std::string detail = std::to_string(b.objects.size()) + " objects, " + std::to_string(g.groups().size()) +
                         " groups, " + std::to_string(fatal) + " fatal / " + std::to_string(other) +
                         " other violations, " + std::to_string(secs) + " s";
    if (fatal) return fail(detail);
    if (!counts_ok) return fail("type counts differ from text scan; " + detail);
    if (secs >= kRealIngestSeconds) return fail("too slow; " + detail);
    return pass(detail);
}

// ---- 3 --------------------------------------------------------------------

Outcome idempotency() {
    const auto base = stix::parse_bundle(support::fixture_text("attack-fixture.json"));
    const auto all = fixture_records();
    auto check = [&](const std::vector<EnrichmentRecord>& recs) {
        const auto once = apply_enrichment(base, recs).bundle;
        const auto twice = apply_enrichment(once, recs);
        return twice.report.objects_created() == 0 &&
               stix::serialize_bundle(twice.bundle) == stix::serialize_bundle(once);
    };
    if (!check(all)) return fail("fixture records");
    std::mt19937 rng(kSeed);
    for (int trial = 0; trial < kIdempotencyTrials; ++trial) {
        std::vector<EnrichmentRecord> subset;
        for (const auto& r : all)
            if (rng() % 2) subset.push_back(r);
        std::shuffle(subset.begin(), subset.end(), rng);
        if (!check(subset)) return fail("trial " + std::to_string(trial));
    }
    return pass("fixture + " + std::to_string(kIdempotencyTrials) + " random subsets byte-identical");
}

// ---- 4 --------------------------------------------------------------------

Outcome dedup() {
    const auto base = stix::parse_bundle(support::fixture_text("attack-fixture.json"));
    const auto g = build_graph(base);
    std::vector<std::string> keys;
    for (const auto& id : g.groups()) keys.push_back(g.group_view(id).attack_id);
    const std::vector<std::string> countries = {"US", "GB", "UA", "DE", "RU", "FR", "JP"};
    const std::vector<std::string> regions = {"europe", "asia", "north-america"};
    const std::vector<std::string> sectors = {"government", "energy", "technology"};

    std::mt19937 rng(kSeed + 4);
    for (int trial = 0; trial < kDedupTrials; ++trial) {
        std::vector<EnrichmentRecord> a, b;
        for (const auto& k : keys) {
            EnrichmentRecord r;
            r.group_key = k;
            for (const auto& c : countries)
                if (rng() % 3 == 0) r.target_countries.push_back(c);
            for (const auto& c : regions)
                if (rng() % 3 == 0) r.target_regions.push_back(c);
            for (const auto& c : sectors)
                if (rng() % 3 == 0) r.target_sectors.push_back(c);
            if (rng() % 2) {
                r.origin_country = countries[rng() % countries.size()];
                r.origin_attribution = Attribution::suspected;
            }
            (rng() % 2 ? a : b).push_back(r);
        }
        // Two passes so nodes from the first must be reused by the second.
        const auto enhanced = apply_enrichment(apply_enrichment(base, a).bundle, b).bundle;
        std::map<std::string, int> locs, idents;
        for (const auto& o : enhanced.objects) {
            if (const auto* l = o.get_if<stix::Location>())
                ++locs[l->country ? "c:" + *l->country : "r:" + l->region.value_or("")];
            if (const auto* i = o.get_if<stix::Identity>(); i && i->identity_class == "class")
                ++idents[i->sectors.front()];
        }
        for (const auto& [value, n] : locs)
            if (n != 1) return fail("trial " + std::to_string(trial) + ": " + value + " x" + std::to_string(n));
        for (const auto& [value, n] : idents)
            if (n != 1) return fail("trial " + std::to_string(trial) + ": sector " + value);
    }
    return pass(std::to_string(kDedupTrials) + " randomized trials, one node per canonical value");
}

// ---- 5 --------------------------------------------------------------------

Outcome query_algebra() {
    const auto& g = support::enhanced_graph();
    const auto raw = support::raw_groups(support::enhanced_fixture().to_json());
    const std::vector<support::Pred> leaves = {{"OriginatesFrom", "RU"},       {"TargetSector", "government"},
                                               {"TargetCountry", "US"},        {"UsesTechnique", "T1078"},
                                               {"Motivation", "organizational-gain"}, {"UsesSoftware", "S0002"}};
    const auto asts = support::all_asts(leaves, kAstDepth);

    std::map<std::string, std::set<std::string>> results;
    for (const auto& ast : asts) {
        const std::string q = support::to_query(*ast);
        const auto got = id_strings(query::evaluate(*query::parse_query(q), g).ids);
        if (got != support::brute_force(*ast, raw)) return fail("oracle mismatch: " + q);
        results[q] = got;
    }

    std::size_t pairs = 0;
    const auto shallow = support::all_asts(leaves, 2);
    for (const auto& a : shallow)
        for (const auto& b : shallow) {
            auto eval = [&](const support::AstPtr& e) {
                return id_strings(query::evaluate(*query::parse_query(support::to_query(*e)), g).ids);
            };
            const auto ab_and = eval(support::conj(a, b)), ba_and = eval(support::conj(b, a));
            const auto ab_or = eval(support::disj(a, b)), ba_or = eval(support::disj(b, a));
            if (ab_and != ba_and || ab_or != ba_or) return fail("commutativity: " + support::to_query(*a));
            const auto& ra = results.at(support::to_query(*a));
            if (!std::includes(ra.begin(), ra.end(), ab_and.begin(), ab_and.end()) ||
                !std::includes(ab_or.begin(), ab_or.end(), ra.begin(), ra.end()))
                return fail("monotonicity: " + support::to_query(*a));
            ++pairs;
        }
    return pass(std::to_string(asts.size()) + " ASTs match the oracle; " + std::to_string(pairs) +
                " pairs commute and are monotone");
}

// ---- 6 --------------------------------------------------------------------

std::string check_overlap(const KnowledgeGraph& g, const std::map<std::string, support::RawGroup>& raw,
                          const std::vector<stix::StixId>& subset) {
    const auto usages = techniques_of_groups(g, subset, false);
    const auto summary = overlap_summary(usages, subset.size());
    const auto hist = support::technique_histogram(raw, id_strings(subset));
    std::size_t sum = 0;
    for (const auto& [count, ids] : summary.tiers) {
        if (count < 1 || count > subset.size()) return "count outside [1, n]";
        sum += ids.size();
        for (const auto& t : ids)
            if (!hist.contains(t) || hist.at(t).size() != count) return "tier of " + t + " disagrees with raw scan";
    }
    if (sum != hist.size() || summary.total_techniques != hist.size()) return "tier sizes do not sum to distinct count";
    return {};
}

std::string random_subsets(const KnowledgeGraph& g, const std::map<std::string, support::RawGroup>& raw,
                           std::mt19937& rng) {
    const auto& groups = g.groups();
    for (int i = 0; i < kOverlapSubsets; ++i) {
        std::vector<stix::StixId> subset;
        const std::size_t k = 1 + rng() % std::min<std::size_t>(groups.size(), 8);
        std::sample(groups.begin(), groups.end(), std::back_inserter(subset), k, rng);
        if (auto err = check_overlap(g, raw, subset); !err.empty()) return err;
    }
    return {};
}

Outcome overlap() {
    const auto& g = support::enhanced_graph();
    const auto raw = support::raw_groups(support::enhanced_fixture().to_json());
    std::vector<stix::StixId> three;
    for (const char* k : {"APT28", "APT29", "Dragonfly 2.0"}) three.push_back(*g.resolve_group(k));
    if (auto err = check_overlap(g, raw, three); !err.empty()) return fail(err);
    std::mt19937 rng(kSeed + 6);
    if (auto err = random_subsets(g, raw, rng); !err.empty()) return fail(err);

    // Tier semantics: 1/2/3 map to light/mid/dark, and all-three is darkest.
    const auto usages = techniques_of_groups(g, three, false);
    const auto layer =
        layer_from_summary(usages, overlap_summary(usages, 3), default_palette(3), LayerMetadata{});
    for (const auto& t : layer.techniques) {
        const char* want = t.score == 1 ? "#FFC7C7" : t.score == 2 ? "#FF6666" : "#C00000";
        if (t.color != want) return fail(t.technique_id + " has colour " + t.color);
    }

    std::string detail = "fixture + " + std::to_string(kOverlapSubsets) + " random subsets";
    if (const char* path = real_bundle_path()) {
        const auto text = support::read_text(path);
        const auto real = build_graph(stix::parse_bundle(text));
        const auto real_raw = support::raw_groups(support::Json::parse(text));
        if (auto err = random_subsets(real, real_raw, rng); !err.empty()) return fail("real bundle: " + err);
        detail += "; real bundle + " + std::to_string(kOverlapSubsets) + " random subsets";
    } else {
        detail += "; real bundle absent";
    }
    return pass(detail);
}

// ---- 7 --------------------------------------------------------------------

Outcome round_trip() {
    std::vector<std::pair<std::string, std::string>> docs = {
        {"attack-fixture.json", support::fixture_text("attack-fixture.json")},
        {"malformed.json", support::fixture_text("malformed.json")},
        {"enhanced", stix::serialize_bundle(support::enhanced_fixture())},
    };
    for (const auto& [name, text] : docs) {
        const auto b1 = stix::parse_bundle(text);
        const auto s1 = stix::serialize_bundle(b1);
        const auto b2 = stix::parse_bundle(s1);
        if (!(b1 == b2)) return fail(name + ": parse/serialize/parse changed the bundle");
        if (stix::serialize_bundle(b2) != s1) return fail(name + ": serialization not byte-stable");
        if (stix::serialize_bundle(stix::parse_bundle(text)) != s1) return fail(name + ": second run differs");
    }
    return pass(std::to_string(docs.size()) + " bundles");
}

// ---- 8 --------------------------------------------------------------------

Outcome suggest_recall() {
    const auto& g = support::enhanced_graph();
    const auto* apt29 = g.find(*g.resolve_group("APT29"))->get_if<stix::IntrusionSet>();
    const auto draft = suggest_enrichment(*apt29, default_gazetteer());
    const auto& r = draft.record;
    if (r.origin_country != "RU") return fail("origin " + r.origin_country.value_or("(none)"));
    auto has = [](const std::vector<std::string>& v, const char* x) { return std::find(v.begin(), v.end(), x) != v.end(); };
    for (const char* s : {"government", "technology", "telecommunications"})
        if (!has(r.target_sectors, s)) return fail(std::string("missing sector ") + s);
    for (const char* s : {"europe", "north-america", "asia"})
        if (!has(r.target_regions, s)) return fail(std::string("missing region ") + s);
    return pass("origin RU; " + std::to_string(r.target_sectors.size()) + " sectors, " +
                std::to_string(r.target_regions.size()) + " regions");
}

// ---- 9 --------------------------------------------------------------------

Outcome golden_layer() {
    const auto& g = support::enhanced_graph();
    std::vector<stix::StixId> three;
    for (const char* k : {"APT28", "APT29", "Dragonfly 2.0"}) three.push_back(*g.resolve_group(k));
    auto emit = [&] {
        const auto usages = techniques_of_groups(g, three, false);
        LayerMetadata meta;
        meta.description = "Techniques used by APT28, APT29, Dragonfly 2.0";
        return write_layer(layer_from_summary(usages, overlap_summary(usages, 3), default_palette(3), meta));
    };
    const std::string first = emit();
    if (first != support::fixture_text("golden_layer.json")) return fail("differs from golden_layer.json");
    if (emit() != first) return fail("second emission differs");
    if (write_layer(read_layer(first)) != first) return fail("read/write not byte-identical");
    return pass("byte-identical to golden_layer.json");
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"Russia / government / US golden query", golden_query},
        {"real-bundle ingest", real_ingest},
        {"enrichment idempotency", idempotency},
        {"location/identity dedup", dedup},
        {"query algebra vs brute-force oracle", query_algebra},
        {"overlap conservation", overlap},
        {"round trip", round_trip},
        {"suggest recall on APT29", suggest_recall},
        {"Navigator golden layer", golden_layer},
    };

    int only = 0;
    if (argc == 3 && std::string(argv[1]) == "--criterion") only = std::atoi(argv[2]);
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::cerr << "no criterion " << only << "\n";
        return 2;
    }

    int failed = 0, skipped = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i) + 1 != only) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
        std::cout << "criterion " << i + 1 << " [" << criteria[i].first << "]: " << tag << " (" << o.detail << ")\n";
        failed += o.status == Status::fail;
        skipped += o.status == Status::skip;
    }
    if (failed) return 1;
    if (only && skipped) return 77;
    return 0;
}
