#include "groupkb/stix.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include "groupkb/error.hpp"
#include "text.hpp"

namespace groupkb::stix {

namespace {

using std::chrono::days;
using std::chrono::hours;
using std::chrono::minutes;
using std::chrono::nanoseconds;
using std::chrono::seconds;

bool is_hex(char c) noexcept { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

bool is_uuid(std::string_view s) noexcept {
    if (s.size() != 36) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool dash = i == 8 || i == 13 || i == 18 || i == 23;
        if (dash ? s[i] != '-' : !is_hex(s[i])) return false;
    }
    return true;
}

bool is_type_token(std::string_view s) noexcept {
    if (s.empty() || s.front() == '-' || s.back() == '-') return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || is_digit(c) || c == '-';
    });
}

bool all_digits(std::string_view s) noexcept {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

int read_int(std::string_view s, std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!is_digit(s[i])) throw std::invalid_argument("non-digit in timestamp");
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

// --- JSON field helpers. Each consumes the key from `rest` so that what is
// left at the end becomes vendor_extensions.

std::optional<std::string> take_string(Json& rest, const char* key, bool required) {
    auto it = rest.find(key);
    if (it == rest.end()) {
        if (required) throw std::invalid_argument(std::string("missing required property ") + key);
        return std::nullopt;
    }
    if (!it->is_string()) throw std::invalid_argument(std::string(key) + " must be a string");
    std::string v = it->get<std::string>();
    rest.erase(it);
    return v;
}

std::vector<std::string> take_string_list(Json& rest, const char* key) {
    std::vector<std::string> out;
    auto it = rest.find(key);
    if (it == rest.end()) return out;
    if (!it->is_array()) throw std::invalid_argument(std::string(key) + " must be an array");
    for (const auto& v : *it) {
        if (!v.is_string())
            throw std::invalid_argument(std::string(key) + " must contain only strings");
        out.push_back(v.get<std::string>());
    }
    rest.erase(it);
    return out;
}

ExternalReference reference_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("external reference must be an object");
    Json rest = j;
    ExternalReference r;
    r.source_name = *take_string(rest, "source_name", true);
    r.external_id = take_string(rest, "external_id", false);
    r.url = take_string(rest, "url", false);
    r.extra = std::move(rest);
    return r;
}

Json reference_to_json(const ExternalReference& r) {
    Json j = r.extra.is_object() ? r.extra : Json::object();
    j["source_name"] = r.source_name;
    if (r.external_id) j["external_id"] = *r.external_id;
    if (r.url) j["url"] = *r.url;
    return j;
}

Common common_from_json(Json& rest, bool name_required) {
    Common c;
    c.id = StixId::parse(*take_string(rest, "id", true));
    rest.erase("type");
    c.spec_version = *take_string(rest, "spec_version", true);
    c.created = Timestamp::parse(*take_string(rest, "created", true));
    c.modified = Timestamp::parse(*take_string(rest, "modified", true));
    c.name = take_string(rest, "name", name_required);
    c.description = take_string(rest, "description", false);
    if (auto it = rest.find("external_references"); it != rest.end()) {
        if (!it->is_array()) throw std::invalid_argument("external_references must be an array");
        for (const auto& r : *it) c.external_references.push_back(reference_from_json(r));
        rest.erase(it);
    }
    return c;
}

Json common_to_json(const Common& c, std::string_view type) {
    Json j = c.vendor_extensions.is_object() ? c.vendor_extensions : Json::object();
    j["type"] = type;
    j["id"] = c.id.str();
    j["spec_version"] = c.spec_version;
    j["created"] = c.created.text;
    j["modified"] = c.modified.text;
    if (c.name) j["name"] = *c.name;
    if (c.description) j["description"] = *c.description;
    if (!c.external_references.empty()) {
        Json refs = Json::array();
        for (const auto& r : c.external_references) refs.push_back(reference_to_json(r));
        j["external_references"] = std::move(refs);
    }
    return j;
}

StixObject typed_from_json(const std::string& type, const Json& doc) {
    Json rest = doc;
    if (type == "intrusion-set") {
        IntrusionSet o;
        o.common = common_from_json(rest, true);
        o.aliases = take_string_list(rest, "aliases");
        o.primary_motivation = take_string(rest, "primary_motivation", false);
        o.secondary_motivations = take_string_list(rest, "secondary_motivations");
        o.common.vendor_extensions = std::move(rest);
        return o;
    }
    if (type == "attack-pattern") {
        AttackPattern o;
        o.common = common_from_json(rest, true);
        o.common.vendor_extensions = std::move(rest);
        auto id = attack_id_of(o.common);
        if (!id) throw std::invalid_argument("attack-pattern has no mitre-attack external id");
        o.attack_id = *id;
        o.is_subtechnique = o.attack_id.find('.') != std::string::npos;
        return o;
    }
    if (type == "malware" || type == "tool") {
        Software o;
        o.kind = type == "malware" ? SoftwareKind::malware : SoftwareKind::tool;
        o.common = common_from_json(rest, true);
        o.common.vendor_extensions = std::move(rest);
        auto id = attack_id_of(o.common);
        if (!id) throw std::invalid_argument(type + " has no mitre-attack external id");
        o.attack_id = *id;
        return o;
    }
    if (type == "identity") {
        Identity o;
        o.common = common_from_json(rest, true);
        o.identity_class = take_string(rest, "identity_class", false).value_or("");
        o.sectors = take_string_list(rest, "sectors");
        o.common.vendor_extensions = std::move(rest);
        return o;
    }
    if (type == "location") {
        Location o;
        o.common = common_from_json(rest, false);
        o.country = take_string(rest, "country", false);
        o.region = take_string(rest, "region", false);
        o.common.vendor_extensions = std::move(rest);
        return o;
    }
    // relationship
    Relationship o;
    o.common = common_from_json(rest, false);
    o.type = *relationship_type_from(*take_string(rest, "relationship_type", true));
    o.source_ref = StixId::parse(*take_string(rest, "source_ref", true));
    o.target_ref = StixId::parse(*take_string(rest, "target_ref", true));
    if (auto it = rest.find("confidence"); it != rest.end()) {
        if (!it->is_number_integer()) throw std::invalid_argument("confidence must be an integer");
        o.confidence = it->get<int>();
        rest.erase(it);
    }
    o.common.vendor_extensions = std::move(rest);
    return o;
}

bool is_modelled(const std::string& type, const Json& doc) {
    static const std::set<std::string> kTypes = {"intrusion-set", "attack-pattern", "malware",
                                                 "tool",          "identity",       "location"};
    if (kTypes.contains(type)) return true;
    if (type != "relationship") return false;
    auto it = doc.find("relationship_type");
    return it != doc.end() && it->is_string() &&
           relationship_type_from(it->get_ref<const std::string&>()).has_value();
}

std::optional<std::string> check_common(const Common& c, std::string_view type, bool name_required) {
    if (c.id.empty()) return "missing id";
    if (c.id.type() != type)
        return "id type \"" + std::string(c.id.type()) + "\" does not match object type \"" +
               std::string(type) + "\"";
    if (c.spec_version != kSpecVersion) return "spec_version is \"" + c.spec_version + "\"";
    if (c.modified.time < c.created.time) return "modified precedes created";
    if (name_required && !c.name) return "missing name";
    return std::nullopt;
}

std::vector<std::string> mitre_ids(const Json& doc) {
    std::vector<std::string> out;
    auto it = doc.find("external_references");
    if (it == doc.end() || !it->is_array()) return out;
    for (const auto& r : *it) {
        if (!r.is_object()) continue;
        auto src = r.find("source_name");
        auto ext = r.find("external_id");
        if (src != r.end() && src->is_string() && *src == kAttackSource && ext != r.end() &&
            ext->is_string())
            out.push_back(ext->get<std::string>());
    }
    return out;
}

std::optional<std::string> single_id(std::vector<std::string> ids, const std::string& owner) {
    if (ids.empty()) return std::nullopt;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() > 1) throw AmbiguousExternalId(owner);
    return ids.front();
}

}  // namespace

// --- StixId ---------------------------------------------------------------

std::optional<StixId> StixId::try_parse(std::string_view text) noexcept {
    const auto sep = text.find("--");
    if (sep == std::string_view::npos) return std::nullopt;
    if (!is_type_token(text.substr(0, sep)) || !is_uuid(text.substr(sep + 2))) return std::nullopt;
    StixId id;
    id.text_ = std::string(text);
    id.sep_ = sep;
    return id;
}

StixId StixId::parse(std::string_view text) {
    auto id = try_parse(text);
    if (!id) throw std::invalid_argument("malformed STIX id \"" + std::string(text) + "\"");
    return *id;
}

StixId StixId::make(std::string_view object_type, std::string_view uuid) {
    std::string text(object_type);
    text += "--";
    text += uuid;
    return parse(text);
}

// --- Timestamp ------------------------------------------------------------

Timestamp Timestamp::parse(std::string_view s) {
    // YYYY-MM-DDTHH:MM:SS[.fraction]Z
    auto bad = [&] {
        return std::invalid_argument("malformed timestamp \"" + std::string(s) + "\"");
    };
    if (s.size() < 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
        s[16] != ':' || s.back() != 'Z')
        throw bad();
    std::string_view frac;
    if (s.size() > 20) {
        if (s[19] != '.') throw bad();
        frac = s.substr(20, s.size() - 21);
        if (!all_digits(frac)) throw bad();
    }
    int y, mo, d, h, mi, sec;
    try {
        y = read_int(s, 0, 4);
        mo = read_int(s, 5, 2);
        d = read_int(s, 8, 2);
        h = read_int(s, 11, 2);
        mi = read_int(s, 14, 2);
        sec = read_int(s, 17, 2);
    } catch (const std::invalid_argument&) {
        throw bad();
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) throw bad();

    std::int64_t ns = 0;
    for (std::size_t i = 0; i < 9; ++i)
        ns = ns * 10 + (i < frac.size() ? frac[i] - '0' : 0);

    Timestamp t;
    t.text = std::string(s);
    t.time = std::chrono::sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + nanoseconds{ns};
    return t;
}

// --- enums ----------------------------------------------------------------

std::string_view to_string(RelationshipType t) noexcept {
    switch (t) {
        case RelationshipType::uses: return "uses";
        case RelationshipType::originates_from: return "originates-from";
        case RelationshipType::targets: return "targets";
    }
    return "uses";
}

std::optional<RelationshipType> relationship_type_from(std::string_view text) noexcept {
    if (text == "uses") return RelationshipType::uses;
    if (text == "originates-from") return RelationshipType::originates_from;
    if (text == "targets") return RelationshipType::targets;
    return std::nullopt;
}

std::string_view to_string(ViolationKind k) noexcept {
    switch (k) {
        case ViolationKind::DuplicateId: return "DuplicateId";
        case ViolationKind::DanglingRef: return "DanglingRef";
        case ViolationKind::IllegalRelationshipTriple: return "IllegalRelationshipTriple";
        case ViolationKind::MalformedCountryCode: return "MalformedCountryCode";
        case ViolationKind::WrongSpecVersion: return "WrongSpecVersion";
        case ViolationKind::MalformedObject: return "MalformedObject";
    }
    return "MalformedObject";
}

// --- codes ----------------------------------------------------------------

bool is_technique_code(std::string_view s) noexcept {
    if (s.size() == 5) return s[0] == 'T' && all_digits(s.substr(1));
    if (s.size() == 9) return s[0] == 'T' && all_digits(s.substr(1, 4)) && s[5] == '.' &&
                              all_digits(s.substr(6));
    return false;
}

bool is_software_code(std::string_view s) noexcept {
    return s.size() == 5 && s[0] == 'S' && all_digits(s.substr(1));
}

bool is_group_code(std::string_view s) noexcept {
    return s.size() == 5 && s[0] == 'G' && all_digits(s.substr(1));
}

bool is_country_code(std::string_view s) noexcept {
    return s.size() == 2 && s[0] >= 'A' && s[0] <= 'Z' && s[1] >= 'A' && s[1] <= 'Z';
}

// --- objects --------------------------------------------------------------

bool Common::is_revoked_or_deprecated() const {
    auto flag = [&](const char* key) {
        auto it = vendor_extensions.find(key);
        return it != vendor_extensions.end() && it->is_boolean() && it->get<bool>();
    };
    return flag("revoked") || flag("x_mitre_deprecated");
}

std::string OpaqueObject::type() const {
    if (document.is_object())
        if (auto it = document.find("type"); it != document.end() && it->is_string())
            return it->get<std::string>();
    return {};
}

std::string OpaqueObject::id_text() const {
    if (document.is_object())
        if (auto it = document.find("id"); it != document.end() && it->is_string())
            return it->get<std::string>();
    return {};
}

std::string StixObject::type() const {
    return std::visit(
        [](const auto& o) -> std::string {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, IntrusionSet>) return "intrusion-set";
            else if constexpr (std::is_same_v<T, AttackPattern>) return "attack-pattern";
            else if constexpr (std::is_same_v<T, Software>)
                return o.kind == SoftwareKind::malware ? "malware" : "tool";
            else if constexpr (std::is_same_v<T, Identity>) return "identity";
            else if constexpr (std::is_same_v<T, Location>) return "location";
            else if constexpr (std::is_same_v<T, Relationship>) return "relationship";
            else return o.type();
        },
        value_);
}

std::string StixObject::id_text() const {
    if (const auto* c = common()) return c->id.str();
    return std::get<OpaqueObject>(value_).id_text();
}

const Common* StixObject::common() const noexcept {
    return std::visit(
        [](const auto& o) -> const Common* {
            if constexpr (std::is_same_v<std::decay_t<decltype(o)>, OpaqueObject>) return nullptr;
            else return &o.common;
        },
        value_);
}

Json StixObject::to_json() const {
    return std::visit(
        [this](const auto& o) -> Json {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, OpaqueObject>) {
                return o.document;
            } else {
                Json j = common_to_json(o.common, type());
                if constexpr (std::is_same_v<T, IntrusionSet>) {
                    if (!o.aliases.empty()) j["aliases"] = o.aliases;
                    if (o.primary_motivation) j["primary_motivation"] = *o.primary_motivation;
                    if (!o.secondary_motivations.empty())
                        j["secondary_motivations"] = o.secondary_motivations;
                } else if constexpr (std::is_same_v<T, Identity>) {
                    if (!o.identity_class.empty()) j["identity_class"] = o.identity_class;
                    if (!o.sectors.empty()) j["sectors"] = o.sectors;
                } else if constexpr (std::is_same_v<T, Location>) {
                    if (o.country) j["country"] = *o.country;
                    if (o.region) j["region"] = *o.region;
                } else if constexpr (std::is_same_v<T, Relationship>) {
                    j["relationship_type"] = to_string(o.type);
                    j["source_ref"] = o.source_ref.str();
                    j["target_ref"] = o.target_ref.str();
                    if (o.confidence) j["confidence"] = *o.confidence;
                }
                return j;
            }
        },
        value_);
}

std::optional<std::string> check_invariants(const StixObject& obj) {
    return std::visit(
        [&obj](const auto& o) -> std::optional<std::string> {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, OpaqueObject>) {
                return o.malformed_reason;
            } else {
                const bool name_required =
                    !std::is_same_v<T, Relationship> && !std::is_same_v<T, Location>;
                if (auto e = check_common(o.common, obj.type(), name_required)) return e;

                if constexpr (std::is_same_v<T, IntrusionSet>) {
                    std::set<std::string> seen;
                    for (const auto& a : o.aliases)
                        if (!seen.insert(text::fold(a)).second) return "duplicate alias \"" + a + "\"";
                    if (o.primary_motivation &&
                        std::find(o.secondary_motivations.begin(), o.secondary_motivations.end(),
                                  *o.primary_motivation) != o.secondary_motivations.end())
                        return "primary_motivation repeated in secondary_motivations";
                } else if constexpr (std::is_same_v<T, AttackPattern>) {
                    if (!is_technique_code(o.attack_id))
                        return "attack id \"" + o.attack_id + "\" is not a technique code";
                    if (o.is_subtechnique != (o.attack_id.find('.') != std::string::npos))
                        return "is_subtechnique disagrees with attack id";
                    if (attack_id_of(o.common) != o.attack_id)
                        return "attack id differs from the mitre-attack external reference";
                } else if constexpr (std::is_same_v<T, Software>) {
                    if (!is_software_code(o.attack_id))
                        return "attack id \"" + o.attack_id + "\" is not a software code";
                    if (attack_id_of(o.common) != o.attack_id)
                        return "attack id differs from the mitre-attack external reference";
                } else if constexpr (std::is_same_v<T, Identity>) {
                    if (o.identity_class.empty()) return "missing identity_class";
                    if (o.identity_class == "class" && o.sectors.size() != 1)
                        return "sector identity must carry exactly one sector";
                } else if constexpr (std::is_same_v<T, Location>) {
                    if (!o.country && !o.region) return "location has neither country nor region";
                    if (o.country && !is_country_code(*o.country))
                        return "country \"" + *o.country + "\" is not an ISO-3166-1 alpha-2 code";
                } else if constexpr (std::is_same_v<T, Relationship>) {
                    if (o.source_ref.empty() || o.target_ref.empty()) return "missing endpoint";
                    if (o.confidence && (*o.confidence < 0 || *o.confidence > 100))
                        return "confidence outside 0..100";
                }
                return std::nullopt;
            }
        },
        obj.value());
}

StixObject object_from_json(const Json& doc) {
    if (!doc.is_object()) return OpaqueObject{doc, "object is not a JSON object"};
    auto it = doc.find("type");
    if (it == doc.end() || !it->is_string()) return OpaqueObject{doc, "missing type"};
    const std::string type = it->get<std::string>();
    if (!is_modelled(type, doc)) {
        auto id = doc.find("id");
        if (id == doc.end() || !id->is_string() || !StixId::try_parse(id->get<std::string>()))
            return OpaqueObject{doc, "missing or malformed id"};
        return OpaqueObject{doc, std::nullopt};
    }
    try {
        StixObject obj = typed_from_json(type, doc);
        if (auto reason = check_invariants(obj)) return OpaqueObject{doc, *reason};
        return obj;
    } catch (const std::invalid_argument& e) {
        return OpaqueObject{doc, e.what()};
    } catch (const AmbiguousExternalId& e) {
        return OpaqueObject{doc, e.what()};
    }
}

// --- bundle ---------------------------------------------------------------

Json Bundle::to_json() const {
    Json j = extra.is_object() ? extra : Json::object();
    j["type"] = "bundle";
    j["id"] = id.str();
    Json objs = Json::array();
    for (const auto& o : objects) objs.push_back(o.to_json());
    j["objects"] = std::move(objs);
    return j;
}

Bundle parse_bundle(std::string_view document) {
    Json doc;
    try {
        doc = Json::parse(document);
    } catch (const Json::parse_error& e) {
        throw MalformedDocument(e.what());
    }
    if (!doc.is_object()) throw MalformedDocument("top level is not a JSON object");
    auto type = doc.find("type");
    if (type == doc.end() || !type->is_string()) throw NotABundle("");
    if (*type != "bundle") throw NotABundle(type->get<std::string>());

    Bundle b;
    auto id = doc.find("id");
    if (id == doc.end() || !id->is_string()) throw MalformedDocument("bundle has no id");
    auto parsed = StixId::try_parse(id->get<std::string>());
    if (!parsed || parsed->type() != "bundle")
        throw MalformedDocument("bundle id \"" + id->get<std::string>() + "\" is malformed");
    b.id = *parsed;

    if (auto objs = doc.find("objects"); objs != doc.end()) {
        if (!objs->is_array()) throw MalformedDocument("\"objects\" is not an array");
        b.objects.reserve(objs->size());
        for (const auto& o : *objs) b.objects.push_back(object_from_json(o));
    }
    doc.erase("type");
    doc.erase("id");
    doc.erase("objects");
    b.extra = std::move(doc);
    return b;
}

std::vector<MalformedObject> malformed_objects(const Bundle& b) {
    std::vector<MalformedObject> out;
    for (const auto& o : b.objects)
        if (const auto* op = o.get_if<OpaqueObject>(); op && op->malformed_reason)
            out.push_back({op->id_text(), *op->malformed_reason});
    return out;
}

std::string serialize_bundle(const Bundle& b) {
    if (b.id.type() != "bundle") throw SerializationRefused("bundle id has wrong type");
    for (const auto& o : b.objects) {
        if (o.is_opaque()) continue;
        if (auto reason = check_invariants(o)) throw SerializationRefused(o.id_text() + ": " + *reason);
    }
    try {
        return b.to_json().dump(2, ' ', false) + "\n";
    } catch (const Json::type_error& e) {
        throw SerializationRefused(e.what());
    }
}

bool is_legal_triple(RelationshipType type, std::string_view src, std::string_view tgt) noexcept {
    switch (type) {
        case RelationshipType::uses:
            if (src == "intrusion-set")
                return tgt == "attack-pattern" || tgt == "malware" || tgt == "tool";
            // ATT&CK bundles also carry software -> technique edges.
            return (src == "malware" || src == "tool") && tgt == "attack-pattern";
        case RelationshipType::originates_from:
            return src == "intrusion-set" && tgt == "location";
        case RelationshipType::targets:
            return src == "intrusion-set" && (tgt == "identity" || tgt == "location");
    }
    return false;
}

std::vector<Violation> validate(const Bundle& b) {
    std::vector<Violation> out;

    std::map<std::string, std::size_t> counts;
    std::map<std::string, std::string> type_of;
    for (const auto& o : b.objects) {
        const auto id = o.id_text();
        ++counts[id];
        type_of.emplace(id, o.type());
    }
    std::set<std::string> reported;
    for (const auto& o : b.objects) {
        const auto id = o.id_text();
        if (counts[id] > 1 && reported.insert(id).second)
            out.push_back({ViolationKind::DuplicateId, id, "id appears " + std::to_string(counts[id]) + " times"});
    }

    for (const auto& o : b.objects) {
        const auto id = o.id_text();
        if (const auto* op = o.get_if<OpaqueObject>()) {
            const Json& d = op->document;
            std::optional<std::string> spec;
            if (d.is_object())
                if (auto it = d.find("spec_version"); it != d.end())
                    spec = it->is_string() ? it->get<std::string>() : it->dump();
            if (spec && *spec != kSpecVersion) {
                out.push_back({ViolationKind::WrongSpecVersion, id, "spec_version is " + *spec});
                continue;
            }
            if (!op->malformed_reason) continue;
            if (op->type() == "location" && d.contains("country") &&
                !(d["country"].is_string() && is_country_code(d["country"].get<std::string>()))) {
                out.push_back({ViolationKind::MalformedCountryCode, id, "country " + d["country"].dump()});
                continue;
            }
            out.push_back({ViolationKind::MalformedObject, id, *op->malformed_reason});
            continue;
        }

        const Common& c = *o.common();
        if (c.spec_version != kSpecVersion)
            out.push_back({ViolationKind::WrongSpecVersion, id, "spec_version is " + c.spec_version});
        if (const auto* loc = o.get_if<Location>(); loc && loc->country && !is_country_code(*loc->country))
            out.push_back({ViolationKind::MalformedCountryCode, id, "country " + *loc->country});

        if (const auto* rel = o.get_if<Relationship>()) {
            const auto src = type_of.find(rel->source_ref.str());
            const auto tgt = type_of.find(rel->target_ref.str());
            if (src == type_of.end())
                out.push_back({ViolationKind::DanglingRef, id, "source_ref " + rel->source_ref.str()});
            if (tgt == type_of.end())
                out.push_back({ViolationKind::DanglingRef, id, "target_ref " + rel->target_ref.str()});
            const std::string_view st = src != type_of.end() ? std::string_view(src->second) : rel->source_ref.type();
            const std::string_view tt = tgt != type_of.end() ? std::string_view(tgt->second) : rel->target_ref.type();
            if (!is_legal_triple(rel->type, st, tt))
                out.push_back({ViolationKind::IllegalRelationshipTriple, id,
                               "(" + std::string(to_string(rel->type)) + ", " + std::string(st) + ", " +
                                   std::string(tt) + ")"});
        }
    }
    return out;
}

std::optional<std::string> attack_id_of(const Common& c) {
    std::vector<std::string> ids;
    for (const auto& r : c.external_references)
        if (r.source_name == kAttackSource && r.external_id) ids.push_back(*r.external_id);
    return single_id(std::move(ids), c.id.str());
}

std::optional<std::string> attack_id_of(const StixObject& o) {
    if (const auto* c = o.common()) return attack_id_of(*c);
    const auto& op = *o.get_if<OpaqueObject>();
    return single_id(mitre_ids(op.document), op.id_text());
}

}  // namespace groupkb::stix
