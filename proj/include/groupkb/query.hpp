#pragma once

// SQL-flavoured group filter language:
//
//   SELECT * FROM GroupsKnowledgeBase WHERE <expr>
//   <expr>
//
//   expr    := term  { OR term }
//   term    := factor { AND factor }
//   factor  := NOT factor | '(' expr ')' | field '==' string
//            | field IN '(' string { ',' string } ')'
//
// Fields: OriginatesFrom TargetCountry TargetRegion TargetSector Motivation
//         UsesTechnique UsesSoftware Name
//
// Keywords and field names are case-insensitive. Offsets are byte offsets
// into the query text.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "groupkb/gazetteer.hpp"
#include "groupkb/graph.hpp"

namespace groupkb::query {

struct Token {
    enum class Kind { keyword, identifier, string_literal, op, lparen, rparen, comma };
    Kind kind;
    std::string text;         // keywords upper-cased; string literals unescaped
    std::size_t offset = 0;   // first byte in the source
    std::size_t length = 0;   // bytes consumed in the source

    friend bool operator==(const Token&, const Token&) = default;
};

// Throws UnterminatedString / IllegalCharacter.
std::vector<Token> tokenize(std::string_view text);

enum class Field {
    OriginatesFrom,
    TargetCountry,
    TargetRegion,
    TargetSector,
    Motivation,
    UsesTechnique,
    UsesSoftware,
    Name,
};

std::string_view to_string(Field f) noexcept;
std::optional<Field> field_from(std::string_view name) noexcept;  // case-insensitive

enum class Op { eq, in_set };

struct Value {
    std::string surface;    // as written
    std::string canonical;  // what evaluation compares against
    bool known = true;      // false when the gazetteer had no entry for it

    friend bool operator==(const Value&, const Value&) = default;
};

// Canonical form of a surface value for a field. Throws SyntaxError (at
// `offset`) for technique ids that are not T#### / T####.###.
Value canonical_value(Field f, std::string_view surface, const Gazetteer& g, std::size_t offset = 0);

struct Predicate {
    Field field;
    Op op = Op::eq;
    std::vector<Value> values;
    std::size_t offset = 0;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { predicate, conj, disj, negation };
    Kind kind;
    Predicate predicate;  // kind == predicate
    ExprPtr lhs;          // conj, disj, negation
    ExprPtr rhs;          // conj, disj
};

ExprPtr make_predicate(Predicate p);
ExprPtr make_and(ExprPtr lhs, ExprPtr rhs);
ExprPtr make_or(ExprPtr lhs, ExprPtr rhs);
ExprPtr make_not(ExprPtr e);

// S-expression form, e.g. And(Pred(OriginatesFrom,eq,RU),Pred(TargetSector,eq,government)).
std::string to_string(const Expr& e);

// Throws SyntaxError / UnknownField. `source_length` is where "end of input"
// errors point; defaults to the end of the last token.
ExprPtr parse_query(std::span<const Token> tokens, const Gazetteer& g = default_gazetteer(),
                    std::optional<std::size_t> source_length = std::nullopt);
ExprPtr parse_query(std::string_view text, const Gazetteer& g = default_gazetteer());

struct EvalOptions {
    bool expand_regions = false;
    const Gazetteer* gazetteer = nullptr;  // default_gazetteer() when null
};

struct QueryWarning {
    enum class Kind { UnknownValue };
    Kind kind = Kind::UnknownValue;
    Field field;
    std::string value;

    friend bool operator==(const QueryWarning&, const QueryWarning&) = default;
};

struct QueryResult {
    std::vector<stix::StixId> ids;  // ordered by attack id
    std::vector<std::string> names;
    std::vector<std::string> attack_ids;
    std::vector<QueryWarning> warnings;
};

QueryResult evaluate(const Expr& e, const KnowledgeGraph& g, const EvalOptions& options = {});

}  // namespace groupkb::query
