#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace groupkb {

// Base of every error the library throws. Callers that only care about
// "user input was bad" vs "we broke an invariant" can switch on
// is_internal().
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, bool internal = false)
        : std::runtime_error(what), internal_(internal) {}

    bool is_internal() const noexcept { return internal_; }

private:
    bool internal_;
};

// stix_core
class MalformedDocument : public Error {
public:
    explicit MalformedDocument(const std::string& reason)
        : Error("malformed document: " + reason) {}
};

class NotABundle : public Error {
public:
    explicit NotABundle(const std::string& found)
        : Error("top-level type is \"" + found + "\", expected \"bundle\"") {}
};

class SerializationRefused : public Error {
public:
    explicit SerializationRefused(const std::string& reason)
        : Error("serialization refused: " + reason, true) {}
};

class AmbiguousExternalId : public Error {
public:
    explicit AmbiguousExternalId(const std::string& object_id)
        : Error("conflicting mitre-attack external ids on " + object_id) {}
};

// enrichment
class MalformedEnrichmentFile : public Error {
public:
    explicit MalformedEnrichmentFile(const std::string& reason)
        : Error("malformed enrichment file: " + reason) {}
};

class DuplicateGroupKey : public Error {
public:
    explicit DuplicateGroupKey(const std::string& key)
        : Error("duplicate group_key in enrichment file: " + key) {}
};

class MalformedGazetteer : public Error {
public:
    explicit MalformedGazetteer(const std::string& reason)
        : Error("malformed gazetteer: " + reason) {}
};

class NoDescription : public Error {
public:
    explicit NoDescription(const std::string& group)
        : Error("group has no description: " + group) {}
};

// graph_store
class UnknownId : public Error {
public:
    explicit UnknownId(const std::string& id) : Error("unknown id: " + id) {}
};

class NotAGroup : public Error {
public:
    explicit NotAGroup(const std::string& id) : Error("not an intrusion-set: " + id) {}
};

class AmbiguousKey : public Error {
public:
    explicit AmbiguousKey(const std::string& key)
        : Error("key resolves to more than one group: " + key) {}
};

// query: every error carries the byte offset into the query text.
class QueryError : public Error {
public:
    QueryError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnterminatedString : public QueryError {
public:
    explicit UnterminatedString(std::size_t offset)
        : QueryError("unterminated string literal", offset) {}
};

class IllegalCharacter : public QueryError {
public:
    IllegalCharacter(std::size_t offset, char c)
        : QueryError(std::string("illegal character '") + c + "'", offset), character_(c) {}

    char character() const noexcept { return character_; }

private:
    char character_;
};

class SyntaxError : public QueryError {
public:
    SyntaxError(std::size_t offset, const std::string& expected, const std::string& found)
        : QueryError("syntax error: expected " + expected + ", found " + found, offset),
          expected_(expected), found_(found) {}

    const std::string& expected() const noexcept { return expected_; }
    const std::string& found() const noexcept { return found_; }

private:
    std::string expected_;
    std::string found_;
};

class UnknownField : public QueryError {
public:
    UnknownField(const std::string& name, std::size_t offset)
        : QueryError("unknown field \"" + name + "\"", offset), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// analytics / navigator_export
class CountExceedsGroups : public Error {
public:
    CountExceedsGroups(const std::string& attack_id, std::size_t count, std::size_t n_groups)
        : Error("technique " + attack_id + " has count " + std::to_string(count) +
                " but only " + std::to_string(n_groups) + " groups were given") {}
};

class MissingPaletteTier : public Error {
public:
    explicit MissingPaletteTier(std::size_t count)
        : Error("palette has no colour for tier " + std::to_string(count)), count_(count) {}

    std::size_t count() const noexcept { return count_; }

private:
    std::size_t count_;
};

// cli
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(what) {}
};

}  // namespace groupkb
