#include "groupkb/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "groupkb/analytics.hpp"
#include "groupkb/enrichment.hpp"
#include "groupkb/error.hpp"
#include "groupkb/gazetteer.hpp"
#include "groupkb/graph.hpp"
#include "groupkb/navigator.hpp"
#include "groupkb/query.hpp"
#include "groupkb/stix.hpp"

namespace groupkb::cli {

namespace {

using Json = nlohmann::json;

struct Options {
    std::string kb;
    std::string records;
    std::string gazetteer;
    std::string out;
    std::string format = "table";
    bool expand_regions = false;
    bool rollup = false;
    std::string palette;
    std::string layer_name = "Technique overlap";
    std::string description;
    std::string layer_version = "4.2";
    std::string attack_version = "9";
    std::string navigator_version = "4.3";
    std::string query;
    std::string query_file;
    bool from_stdin = false;
    std::vector<std::string> positional;
};

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) throw InputError("cannot write " + path);
}

stix::Bundle load_kb(const Options& o) {
    if (o.kb.empty()) throw InputError("no knowledge base given (use --kb or set ATTCK_KB)");
    return stix::parse_bundle(read_file(o.kb));
}

Gazetteer load_gazetteer(const Options& o) {
    if (o.gazetteer.empty()) return default_gazetteer();
    return Gazetteer::parse(read_file(o.gazetteer));
}

void report_graph_warnings(const KnowledgeGraph& g, std::ostream& err) {
    for (const auto& w : g.warnings())
        err << "warning: " << to_string(w.kind) << " " << w.relationship_id << ": " << w.detail << "\n";
}

void report_query_error(const QueryError& e, const std::string& text, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (text.find('\n') == std::string::npos) {
        err << "  " << text << "\n  " << std::string(std::min(e.offset(), text.size()), ' ') << "^\n";
    }
}

query::QueryResult run_query(const std::string& text, const KnowledgeGraph& g, const Gazetteer& gaz,
                             bool expand_regions, std::ostream& err) {
    const auto expr = query::parse_query(text, gaz);
    query::EvalOptions eo;
    eo.expand_regions = expand_regions;
    eo.gazetteer = &gaz;
    auto result = query::evaluate(*expr, g, eo);
    for (const auto& w : result.warnings)
        err << "warning: no group matched unknown " << query::to_string(w.field) << " value \"" << w.value
            << "\"\n";
    return result;
}

std::string query_text(const Options& o) {
    if (!o.query_file.empty()) return read_file(o.query_file);
    return o.query;
}

// ---- commands -------------------------------------------------------------

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
    const auto bundle = load_kb(o);
    std::map<std::string, std::size_t> counts;
    for (const auto& obj : bundle.objects) ++counts[obj.type()];
    for (const auto& m : stix::malformed_objects(bundle))
        err << "warning: malformed object " << m.id << ": " << m.reason << "\n";
    const auto g = build_graph(bundle);
    report_graph_warnings(g, err);
    err << bundle.objects.size() << " objects, " << g.groups().size() << " groups indexed\n";
    if (!o.out.empty()) write_output(stix::serialize_bundle(bundle), o.out, out);
    for (const auto& [type, n] : counts) out << type << "\t" << n << "\n";
    return 0;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
    (void)out;
    const auto bundle = load_kb(o);
    const auto violations = stix::validate(bundle);
    for (const auto& v : violations)
        err << stix::to_string(v.kind) << "\t" << v.object_id << "\t" << v.detail << "\n";
    err << violations.size() << " violation" << (violations.size() == 1 ? "" : "s") << "\n";
    return violations.empty() ? 0 : 1;
}

int cmd_enrich(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.records.empty()) throw InputError("enrich needs --records");
    const auto gaz = load_gazetteer(o);
    const auto bundle = load_kb(o);
    const auto loaded = load_enrichment(read_file(o.records), gaz);
    for (const auto& w : loaded.warnings)
        err << "warning: " << to_string(w.kind) << " " << w.group_key << ": " << w.value << "\n";
    const auto result = apply_enrichment(bundle, loaded.records);
    const auto& r = result.report;
    for (const auto& key : r.groups_unmatched) err << "warning: no group matches \"" << key << "\"\n";
    for (const auto& key : r.groups_ambiguous) err << "warning: ambiguous group key \"" << key << "\"\n";
    err << "groups matched: " << r.groups_matched << "\n"
        << "locations created: " << r.locations_created << "\n"
        << "identities created: " << r.identities_created << "\n"
        << "relationships created: " << r.relationships_created << "\n"
        << "motivations set: " << r.motivations_set << "\n"
        << "objects created: " << r.objects_created() << "\n";
    write_output(stix::serialize_bundle(result.bundle), o.out, out);
    return 0;
}

Json witness_json(const Witness& w) {
    return {{"kind", std::string(to_string(w.kind))}, {"token", w.token}, {"begin", w.begin}, {"end", w.end}};
}

int cmd_suggest(const Options& o, std::ostream& out, std::ostream& err) {
    const auto gaz = load_gazetteer(o);
    const auto bundle = load_kb(o);
    const auto g = build_graph(bundle);

    std::vector<stix::StixId> ids;
    if (o.positional.empty()) {
        ids = g.groups();
    } else {
        for (const auto& key : o.positional) {
            auto id = g.resolve_group(key);
            if (!id) throw InputError("no group matches \"" + key + "\"");
            ids.push_back(*id);
        }
    }

    Json drafts = Json::array();
    for (const auto& id : ids) {
        const auto* set = g.find(id)->get_if<stix::IntrusionSet>();
        if (!set) continue;
        if (o.positional.empty() && !set->common.description) {
            err << "skipped " << id.str() << ": no description\n";
            continue;
        }
        const auto draft = suggest_enrichment(*set, gaz);
        Json witnesses = Json::array();
        for (const auto& w : draft.witnesses) witnesses.push_back(witness_json(w));
        drafts.push_back({{"draft", draft.draft}, {"record", to_json(draft.record)}, {"witnesses", witnesses}});
    }
    write_output(drafts.dump(2, ' ', false) + "\n", o.out, out);
    return 0;
}

int cmd_query(const Options& o, std::ostream& out, std::ostream& err) {
    const std::string text = query_text(o);
    if (text.empty()) throw InputError("no query given");
    const auto gaz = load_gazetteer(o);
    const auto bundle = load_kb(o);
    const auto g = build_graph(bundle);
    query::QueryResult result;
    try {
        result = run_query(text, g, gaz, o.expand_regions, err);
    } catch (const QueryError& e) {
        report_query_error(e, text, err);
        return 1;
    }

    std::ostringstream ss;
    if (o.format == "ids") {
        for (const auto& id : result.ids) ss << id.str() << "\n";
    } else if (o.format == "json") {
        Json j = Json::object();
        j["ids"] = Json::array();
        for (const auto& id : result.ids) j["ids"].push_back(id.str());
        j["names"] = result.names;
        j["attack_ids"] = result.attack_ids;
        j["warnings"] = Json::array();
        for (const auto& w : result.warnings)
            j["warnings"].push_back(
                {{"kind", "UnknownValue"}, {"field", std::string(query::to_string(w.field))}, {"value", w.value}});
        ss << j.dump(2, ' ', false) << "\n";
    } else {
        for (std::size_t i = 0; i < result.ids.size(); ++i)
            ss << result.attack_ids[i] << "\t" << result.names[i] << "\n";
    }
    write_output(ss.str(), o.out, out);
    err << result.ids.size() << " group" << (result.ids.size() == 1 ? "" : "s") << "\n";
    return 0;
}

// Groups named by positional keys, --query/--query-file and --stdin lines.
std::vector<stix::StixId> selected_groups(const Options& o, const KnowledgeGraph& g, const Gazetteer& gaz,
                                          std::istream& in, std::ostream& err) {
    std::set<stix::StixId> ids;
    bool any_source = false;
    auto add_key = [&](const std::string& key) {
        if (auto sid = stix::StixId::try_parse(key); sid && g.contains(*sid)) {
            if (!g.find(*sid)->get_if<stix::IntrusionSet>()) throw InputError(key + " is not an intrusion set");
            ids.insert(*sid);
            return;
        }
        auto id = g.resolve_group(key);
        if (!id) throw InputError("no group matches \"" + key + "\"");
        ids.insert(*id);
    };
    for (const auto& key : o.positional) {
        any_source = true;
        add_key(key);
    }
    const std::string text = query_text(o);
    if (!text.empty()) {
        any_source = true;
        for (const auto& id : run_query(text, g, gaz, o.expand_regions, err).ids) ids.insert(id);
    }
    if (o.from_stdin) {
        any_source = true;
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
            const auto start = line.find_first_not_of(" \t");
            if (start == std::string::npos) continue;
            add_key(line.substr(start));
        }
    }
    if (!any_source) throw InputError("no groups given (pass group keys, --query, --query-file or --stdin)");
    return {ids.begin(), ids.end()};
}

std::string group_list(const KnowledgeGraph& g, std::span<const stix::StixId> ids) {
    std::vector<std::pair<std::string, std::string>> labelled;
    for (const auto& id : ids) {
        const auto view = g.group_view(id);
        labelled.emplace_back(view.attack_id.empty() ? id.str() : view.attack_id, view.name);
    }
    std::sort(labelled.begin(), labelled.end());
    std::string s;
    for (const auto& [code, name] : labelled) {
        if (!s.empty()) s += ", ";
        s += name;
    }
    return s;
}

template <class F>
int with_query_errors(const Options& o, std::ostream& err, F&& f) {
    try {
        return f();
    } catch (const QueryError& e) {
        report_query_error(e, query_text(o), err);
        return 1;
    }
}

int cmd_techniques(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
    const auto gaz = load_gazetteer(o);
    const auto bundle = load_kb(o);
    const auto g = build_graph(bundle);
    return with_query_errors(o, err, [&] {
        const auto ids = selected_groups(o, g, gaz, in, err);
        const auto usages = techniques_of_groups(g, ids, o.rollup);
        std::ostringstream ss;
        if (o.format == "json") {
            Json j = Json::array();
            for (const auto& u : usages)
                j.push_back({{"attack_id", u.attack_id},
                             {"technique_name", u.technique_name},
                             {"count", u.count},
                             {"groups", u.groups}});
            ss << j.dump(2, ' ', false) << "\n";
        } else {
            for (const auto& u : usages) {
                ss << u.attack_id << "\t" << u.count << "\t" << u.technique_name << "\t";
                for (std::size_t i = 0; i < u.groups.size(); ++i) ss << (i ? "," : "") << u.groups[i];
                ss << "\n";
            }
        }
        write_output(ss.str(), o.out, out);
        err << usages.size() << " techniques across " << ids.size() << " groups\n";
        return 0;
    });
}

int cmd_layer(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
    const auto gaz = load_gazetteer(o);
    const auto bundle = load_kb(o);
    const auto g = build_graph(bundle);
    return with_query_errors(o, err, [&] {
        const auto ids = selected_groups(o, g, gaz, in, err);
        const auto usages = techniques_of_groups(g, ids, o.rollup);
        const auto summary = overlap_summary(usages, ids.size());
        Palette palette;
        if (o.palette.empty()) {
            palette = default_palette(ids.size());
        } else {
            try {
                palette = parse_palette(read_file(o.palette));
            } catch (const std::invalid_argument& e) {
                throw InputError(e.what());
            }
        }
        LayerMetadata meta;
        meta.name = o.layer_name;
        meta.description = o.description.empty() ? "Techniques used by " + group_list(g, ids) : o.description;
        meta.versions = {o.layer_version, o.attack_version, o.navigator_version};
        const auto layer = layer_from_summary(usages, summary, palette, meta);
        write_output(write_layer(layer), o.out, out);
        err << layer.techniques.size() << " techniques, " << layer.legend.size() << " tiers\n";
        return 0;
    });
}

void add_kb(CLI::App* sub, Options& o) {
    sub->add_option("--kb", o.kb, "STIX 2.1 bundle")->envname("ATTCK_KB");
}

void add_gazetteer(CLI::App* sub, Options& o) {
    sub->add_option("--gazetteer", o.gazetteer, "gazetteer JSON (default: built-in)");
}

void add_group_sources(CLI::App* sub, Options& o) {
    sub->add_option("groups", o.positional, "group keys: G####, name or alias");
    sub->add_option("--query", o.query, "select groups with a query");
    sub->add_option("--query-file", o.query_file, "read the query from a file");
    sub->add_flag("--stdin", o.from_stdin, "read group ids or keys from stdin, one per line");
    sub->add_flag("--expand-regions", o.expand_regions, "region predicates also match member countries");
    sub->add_flag("--rollup", o.rollup, "credit sub-technique use to the parent technique");
}

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Query and export MITRE ATT&CK group knowledge", "groupkb"};
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand("ingest", "parse a bundle and print object counts per type");
    add_kb(ingest, o);
    ingest->add_option("--out", o.out, "write the canonical serialization here");

    auto* validate = app.add_subcommand("validate", "check a bundle against the model's invariants");
    add_kb(validate, o);

    auto* enrich = app.add_subcommand("enrich", "apply enrichment records to a bundle");
    add_kb(enrich, o);
    add_gazetteer(enrich, o);
    enrich->add_option("--records", o.records, "enrichment records JSON")->required();
    enrich->add_option("--out", o.out, "output bundle (default: stdout)");

    auto* suggest = app.add_subcommand("suggest", "draft enrichment records from group descriptions");
    add_kb(suggest, o);
    add_gazetteer(suggest, o);
    suggest->add_option("groups", o.positional, "group keys (default: every group)");
    suggest->add_option("--out", o.out, "output file (default: stdout)");

    auto* query = app.add_subcommand("query", "filter groups");
    add_kb(query, o);
    add_gazetteer(query, o);
    query->add_option("query", o.query, "query text");
    query->add_option("--query-file", o.query_file, "read the query from a file");
    query->add_option("--format", o.format, "table, json or ids")
        ->check(CLI::IsMember({"table", "json", "ids"}));
    query->add_flag("--expand-regions", o.expand_regions, "region predicates also match member countries");
    query->add_option("--out", o.out, "output file (default: stdout)");

    auto* techniques = app.add_subcommand("techniques", "techniques of a group set, most shared first");
    add_kb(techniques, o);
    add_gazetteer(techniques, o);
    add_group_sources(techniques, o);
    techniques->add_option("--format", o.format, "table or json")->check(CLI::IsMember({"table", "json"}));
    techniques->add_option("--out", o.out, "output file (default: stdout)");

    auto* layer = app.add_subcommand("layer", "write an ATT&CK Navigator overlap layer");
    add_kb(layer, o);
    add_gazetteer(layer, o);
    add_group_sources(layer, o);
    layer->add_option("--out", o.out, "layer file (default: stdout)");
    layer->add_option("--palette", o.palette, "JSON object mapping tier count to #RRGGBB");
    layer->add_option("--layer-name", o.layer_name, "layer name");
    layer->add_option("--description", o.description, "layer description");
    layer->add_option("--layer-version", o.layer_version, "Navigator layer format version");
    layer->add_option("--attack-version", o.attack_version, "ATT&CK version");
    layer->add_option("--navigator-version", o.navigator_version, "Navigator version");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    if (*ingest) return cmd_ingest(o, out, err);
    if (*validate) return cmd_validate(o, out, err);
    if (*enrich) return cmd_enrich(o, out, err);
    if (*suggest) return cmd_suggest(o, out, err);
    if (*query) return cmd_query(o, out, err);
    if (*techniques) return cmd_techniques(o, in, out, err);
    return cmd_layer(o, in, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, in, out, err);
    } catch (const QueryError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << (e.is_internal() ? "internal error: " : "error: ") << e.what() << "\n";
        return e.is_internal() ? 2 : 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

Outcome run(const std::vector<std::string>& args, const std::optional<std::string>& stdin_text) {
    std::istringstream in(stdin_text.value_or(""));
    std::ostringstream out, err;
    Outcome o;
    o.exit_code = run(args, in, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

}  // namespace groupkb::cli
