#pragma once

// Typed view over STIX 2.1 bundles as published for the ATT&CK Groups
// knowledge base. Objects the model does not know about (course-of-action,
// x-mitre-*, marking-definition, ...) are kept as opaque JSON so that a
// parse/serialize cycle never loses data.

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

namespace groupkb::stix {

using Json = nlohmann::json;

inline constexpr std::string_view kSpecVersion = "2.1";
inline constexpr std::string_view kAttackSource = "mitre-attack";

// `<object_type>--<uuid>`. Ordering and equality follow the canonical text.
class StixId {
public:
    StixId() = default;

    // Throws std::invalid_argument on anything that is not a lowercase
    // type token, "--", and an RFC-4122 formatted UUID.
    static StixId parse(std::string_view text);
    static std::optional<StixId> try_parse(std::string_view text) noexcept;
    static StixId make(std::string_view object_type, std::string_view uuid);

    std::string_view type() const noexcept { return std::string_view(text_).substr(0, sep_); }
    std::string_view uuid() const noexcept { return std::string_view(text_).substr(sep_ + 2); }
    const std::string& str() const noexcept { return text_; }
    bool empty() const noexcept { return text_.empty(); }

    friend bool operator==(const StixId&, const StixId&) = default;
    friend std::strong_ordering operator<=>(const StixId& a, const StixId& b) noexcept {
        return a.text_ <=> b.text_;
    }

private:
    std::string text_;
    std::size_t sep_ = 0;
};

// RFC-3339 UTC timestamp ending in "Z". The text is kept exactly as written
// so sub-second precision survives; `time` is the parsed instant.
struct Timestamp {
    std::string text;
    std::chrono::sys_time<std::chrono::nanoseconds> time{};

    static Timestamp parse(std::string_view text);  // throws std::invalid_argument

    friend bool operator==(const Timestamp& a, const Timestamp& b) { return a.text == b.text; }
};

struct ExternalReference {
    std::string source_name;
    std::optional<std::string> external_id;
    std::optional<std::string> url;
    Json extra = Json::object();  // description, external hashes, ...
};

// Properties shared by every typed object. Anything not modelled lands in
// vendor_extensions untouched (x_mitre_version, x_mitre_contributors,
// revoked, created_by_ref, object_marking_refs, ...).
struct Common {
    StixId id;
    std::string spec_version{kSpecVersion};
    Timestamp created;
    Timestamp modified;
    std::optional<std::string> name;
    std::optional<std::string> description;
    std::vector<ExternalReference> external_references;
    Json vendor_extensions = Json::object();

    // `revoked: true` or `x_mitre_deprecated: true`.
    bool is_revoked_or_deprecated() const;
};

struct IntrusionSet {
    Common common;
    std::vector<std::string> aliases;
    std::optional<std::string> primary_motivation;
    std::vector<std::string> secondary_motivations;
};

struct AttackPattern {
    Common common;
    std::string attack_id;  // T#### or T####.###
    bool is_subtechnique = false;
};

enum class SoftwareKind { malware, tool };

struct Software {
    Common common;
    SoftwareKind kind = SoftwareKind::malware;
    std::string attack_id;  // S####
};

struct Identity {
    Common common;
    std::string identity_class;
    std::vector<std::string> sectors;
};

struct Location {
    Common common;
    std::optional<std::string> country;  // ISO-3166-1 alpha-2
    std::optional<std::string> region;
};

enum class RelationshipType { uses, originates_from, targets };

std::string_view to_string(RelationshipType t) noexcept;
std::optional<RelationshipType> relationship_type_from(std::string_view text) noexcept;

struct Relationship {
    Common common;
    RelationshipType type = RelationshipType::uses;
    StixId source_ref;
    StixId target_ref;
    std::optional<int> confidence;
};

// Any object the typed model does not cover, or a recognized object that
// failed its invariants (then malformed_reason says why).
struct OpaqueObject {
    Json document;
    std::optional<std::string> malformed_reason;

    std::string type() const;
    std::string id_text() const;
};

class StixObject {
public:
    using Variant = std::variant<IntrusionSet, AttackPattern, Software, Identity, Location,
                                 Relationship, OpaqueObject>;

    StixObject(Variant v) : value_(std::move(v)) {}  // NOLINT: implicit by intent
    template <class T>
        requires std::is_constructible_v<Variant, T&&> && (!std::is_same_v<std::remove_cvref_t<T>, Variant>) &&
                 (!std::is_same_v<std::remove_cvref_t<T>, StixObject>)
    StixObject(T&& v) : value_(std::forward<T>(v)) {}  // NOLINT

    // Object type string as it appears in the "type" property.
    std::string type() const;
    // Canonical id text; for opaque objects whatever the document carried.
    std::string id_text() const;
    // Null for opaque objects.
    const Common* common() const noexcept;

    bool is_opaque() const noexcept { return std::holds_alternative<OpaqueObject>(value_); }

    template <class T>
    const T* get_if() const noexcept { return std::get_if<T>(&value_); }
    template <class T>
    T* get_if() noexcept { return std::get_if<T>(&value_); }

    const Variant& value() const noexcept { return value_; }

    Json to_json() const;

    friend bool operator==(const StixObject& a, const StixObject& b) {
        return a.to_json() == b.to_json();
    }

private:
    Variant value_;
};

struct Bundle {
    StixId id;
    std::vector<StixObject> objects;
    Json extra = Json::object();  // top-level keys other than type/id/objects

    Json to_json() const;

    // Semantic equality: same objects in the same order with the same values.
    friend bool operator==(const Bundle& a, const Bundle& b) { return a.to_json() == b.to_json(); }
};

// Objects whose invariants failed at parse time.
struct MalformedObject {
    std::string id;
    std::string reason;
};

// Throws MalformedDocument / NotABundle. Per-object problems do not throw:
// the object is kept opaque and listed by malformed_objects().
Bundle parse_bundle(std::string_view document);

std::vector<MalformedObject> malformed_objects(const Bundle& b);

// Canonical text: sorted keys, two-space indent, trailing newline.
// Throws SerializationRefused when a typed object breaks its invariants.
std::string serialize_bundle(const Bundle& b);

// Typed object from one JSON object; returns an OpaqueObject (possibly with
// malformed_reason) when the object is not one of the modelled kinds.
StixObject object_from_json(const Json& doc);

// Empty optional when the object satisfies its type invariants.
std::optional<std::string> check_invariants(const StixObject& o);

enum class ViolationKind {
    DuplicateId,
    DanglingRef,
    IllegalRelationshipTriple,
    MalformedCountryCode,
    WrongSpecVersion,
    MalformedObject,
};

std::string_view to_string(ViolationKind k) noexcept;

struct Violation {
    ViolationKind kind;
    std::string object_id;
    std::string detail;

    friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate(const Bundle& b);

// True when (type, source type, target type) is an edge the model allows.
bool is_legal_triple(RelationshipType type, std::string_view source_type,
                     std::string_view target_type) noexcept;

// external_id of the "mitre-attack" reference. Throws AmbiguousExternalId
// when two such references disagree.
std::optional<std::string> attack_id_of(const StixObject& o);
std::optional<std::string> attack_id_of(const Common& c);

bool is_technique_code(std::string_view s) noexcept;  // T#### or T####.###
bool is_software_code(std::string_view s) noexcept;   // S####
bool is_group_code(std::string_view s) noexcept;      // G####
bool is_country_code(std::string_view s) noexcept;    // two uppercase ASCII letters

}  // namespace groupkb::stix
