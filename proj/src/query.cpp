#include "groupkb/query.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <set>

#include "groupkb/error.hpp"
#include "text.hpp"

namespace groupkb::query {

using stix::RelationshipType;
using stix::StixId;
using IdSet = std::set<StixId>;

namespace {

constexpr std::array<std::string_view, 7> kKeywords = {"SELECT", "FROM", "WHERE", "AND",
                                                       "OR",     "NOT",  "IN"};
constexpr std::string_view kTableName = "GroupsKnowledgeBase";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string describe(const Token& t) {
    switch (t.kind) {
        case Token::Kind::string_literal: return "string \"" + t.text + "\"";
        case Token::Kind::keyword: return t.text;
        default: return "'" + t.text + "'";
    }
}

class Parser {
public:
    Parser(std::span<const Token> tokens, const Gazetteer& g, std::size_t end)
        : tokens_(tokens), g_(g), end_(end) {}

    ExprPtr parse() {
        if (at_keyword("SELECT")) {
            ++pos_;
            expect_op("*");
            expect_keyword("FROM");
            const Token& table = expect(Token::Kind::identifier, std::string(kTableName));
            if (!text::iequals(table.text, kTableName))
                throw SyntaxError(table.offset, std::string(kTableName), describe(table));
            expect_keyword("WHERE");
        } else if (at_keyword("WHERE")) {
            ++pos_;
        }
        ExprPtr e = parse_or();
        if (pos_ < tokens_.size())
            throw SyntaxError(tokens_[pos_].offset, "AND, OR or end of input", describe(tokens_[pos_]));
        return e;
    }

private:
    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at_keyword("OR")) {
            ++pos_;
            lhs = make_or(lhs, parse_and());
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (at_keyword("AND")) {
            ++pos_;
            lhs = make_and(lhs, parse_not());
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (at_keyword("NOT")) {
            ++pos_;
            return make_not(parse_not());
        }
        if (at(Token::Kind::lparen)) {
            ++pos_;
            ExprPtr e = parse_or();
            expect(Token::Kind::rparen, "')'");
            return e;
        }
        return parse_predicate();
    }

    ExprPtr parse_predicate() {
        const Token& name = expect(Token::Kind::identifier, "field name");
        const auto field = field_from(name.text);
        if (!field) throw UnknownField(name.text, name.offset);

        Predicate p;
        p.field = *field;
        p.offset = name.offset;
        if (at_keyword("IN")) {
            ++pos_;
            p.op = Op::in_set;
            expect(Token::Kind::lparen, "'('");
            do {
                const Token& v = expect(Token::Kind::string_literal, "string literal");
                p.values.push_back(canonical_value(*field, v.text, g_, v.offset));
            } while (accept(Token::Kind::comma));
            expect(Token::Kind::rparen, "')' or ','");
        } else {
            expect_op("==");
            const Token& v = expect(Token::Kind::string_literal, "string literal");
            p.values.push_back(canonical_value(*field, v.text, g_, v.offset));
        }
        return make_predicate(std::move(p));
    }

    bool at(Token::Kind k) const { return pos_ < tokens_.size() && tokens_[pos_].kind == k; }
    bool at_keyword(std::string_view kw) const {
        return at(Token::Kind::keyword) && tokens_[pos_].text == kw;
    }
    bool accept(Token::Kind k) {
        if (!at(k)) return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        if (pos_ >= tokens_.size()) throw SyntaxError(end_, expected, "end of input");
        throw SyntaxError(tokens_[pos_].offset, expected, describe(tokens_[pos_]));
    }

    const Token& expect(Token::Kind k, const std::string& expected) {
        if (!at(k)) fail(expected);
        return tokens_[pos_++];
    }
    void expect_keyword(std::string_view kw) {
        if (!at_keyword(kw)) fail(std::string(kw));
        ++pos_;
    }
    void expect_op(std::string_view op) {
        if (!at(Token::Kind::op) || tokens_[pos_].text != op) fail("'" + std::string(op) + "'");
        ++pos_;
    }

    std::span<const Token> tokens_;
    const Gazetteer& g_;
    std::size_t end_;
    std::size_t pos_ = 0;
};

IdSet only_groups(const KnowledgeGraph& g, const std::vector<StixId>& ids) {
    IdSet out;
    for (const auto& id : ids)
        if (id.type() == "intrusion-set" && g.contains(id)) out.insert(id);
    return out;
}

void merge(IdSet& into, const IdSet& from) { into.insert(from.begin(), from.end()); }

IdSet sources_of(const KnowledgeGraph& g, const std::vector<StixId>& targets, RelationshipType rel) {
    IdSet out;
    for (const auto& t : targets) merge(out, only_groups(g, g.neighbors(t, rel, Direction::in)));
    return out;
}

class Evaluator {
public:
    Evaluator(const KnowledgeGraph& g, const EvalOptions& o)
        : g_(g), gz_(o.gazetteer ? *o.gazetteer : default_gazetteer()), expand_(o.expand_regions) {
        universe_.insert(g.groups().begin(), g.groups().end());
    }

    IdSet eval(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::predicate: return eval_predicate(e.predicate);
            case Expr::Kind::conj: {
                const IdSet a = eval(*e.lhs), b = eval(*e.rhs);
                IdSet out;
                std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
                return out;
            }
            case Expr::Kind::disj: {
                IdSet out = eval(*e.lhs);
                merge(out, eval(*e.rhs));
                return out;
            }
            case Expr::Kind::negation: {
                const IdSet inner = eval(*e.lhs);
                IdSet out;
                std::set_difference(universe_.begin(), universe_.end(), inner.begin(), inner.end(),
                                    std::inserter(out, out.end()));
                return out;
            }
        }
        return {};
    }

    std::vector<QueryWarning> warnings;

private:
    IdSet eval_predicate(const Predicate& p) {
        IdSet out;
        for (const auto& v : p.values) {
            IdSet hits = eval_value(p.field, v);
            if (!v.known && hits.empty()) {
                QueryWarning w{QueryWarning::Kind::UnknownValue, p.field, v.surface};
                if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
            }
            merge(out, hits);
        }
        return out;
    }

    IdSet eval_value(Field f, const Value& v) {
        const std::string& c = v.canonical;
        switch (f) {
            case Field::OriginatesFrom:
                return sources_of(g_, g_.locations_with_country(c), RelationshipType::originates_from);
            case Field::TargetCountry: {
                IdSet out = sources_of(g_, g_.locations_with_country(c), RelationshipType::targets);
                if (expand_)
                    for (const auto& [region, members] : gz_.region_members())
                        if (std::find(members.begin(), members.end(), c) != members.end())
                            merge(out, sources_of(g_, g_.locations_with_region(region), RelationshipType::targets));
                return out;
            }
            case Field::TargetRegion:
                return sources_of(g_, g_.locations_with_region(c), RelationshipType::targets);
            case Field::TargetSector:
                return sources_of(g_, g_.identities_with_sector(c), RelationshipType::targets);
            case Field::Motivation: {
                IdSet out;
                for (const auto& id : universe_) {
                    const auto& is = *g_.find(id)->get_if<stix::IntrusionSet>();
                    auto eq = [&](const std::string& m) { return text::iequals(m, c); };
                    if ((is.primary_motivation && eq(*is.primary_motivation)) ||
                        std::any_of(is.secondary_motivations.begin(), is.secondary_motivations.end(), eq))
                        out.insert(id);
                }
                return out;
            }
            case Field::UsesTechnique: {
                auto t = g_.technique(c);
                return t ? sources_of(g_, {*t}, RelationshipType::uses) : IdSet{};
            }
            case Field::UsesSoftware: {
                auto s = g_.software(c);
                return s ? sources_of(g_, {*s}, RelationshipType::uses) : IdSet{};
            }
            case Field::Name: {
                IdSet out;
                for (const auto& id : universe_) {
                    const auto& is = *g_.find(id)->get_if<stix::IntrusionSet>();
                    bool hit = (is.common.name && text::iequals(*is.common.name, c)) ||
                               std::any_of(is.aliases.begin(), is.aliases.end(),
                                           [&](const std::string& a) { return text::iequals(a, c); });
                    if (!hit) hit = text::iequals(safe_attack_id(is.common).value_or(""), c);
                    if (hit) out.insert(id);
                }
                return out;
            }
        }
        return {};
    }

    const KnowledgeGraph& g_;
    const Gazetteer& gz_;
    bool expand_;
    IdSet universe_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (ident_start(c)) {
            while (i < s.size() && ident_char(s[i])) ++i;
            std::string word(s.substr(start, i - start));
            const auto upper = text::upper(word);
            const bool kw = std::find(kKeywords.begin(), kKeywords.end(), upper) != kKeywords.end();
            out.push_back({kw ? Token::Kind::keyword : Token::Kind::identifier, kw ? upper : word, start,
                           i - start});
            continue;
        }
        if (c == '"') {
            std::string value;
            ++i;
            bool closed = false;
            while (i < s.size()) {
                const char d = s[i];
                if (d == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                if (d == '\\') {
                    if (i + 1 >= s.size()) break;
                    const char e = s[i + 1];
                    value += e == 'n' ? '\n' : e == 't' ? '\t' : e == 'r' ? '\r' : e;
                    i += 2;
                    continue;
                }
                value += d;
                ++i;
            }
            if (!closed) throw UnterminatedString(start);
            out.push_back({Token::Kind::string_literal, std::move(value), start, i - start});
            continue;
        }
        if (c == '=') {
            if (i + 1 < s.size() && s[i + 1] == '=') {
                out.push_back({Token::Kind::op, "==", start, 2});
                i += 2;
                continue;
            }
            throw IllegalCharacter(start, c);
        }
        switch (c) {
            case '*': out.push_back({Token::Kind::op, "*", start, 1}); break;
            case '(': out.push_back({Token::Kind::lparen, "(", start, 1}); break;
            case ')': out.push_back({Token::Kind::rparen, ")", start, 1}); break;
            case ',': out.push_back({Token::Kind::comma, ",", start, 1}); break;
            default: throw IllegalCharacter(start, c);
        }
        ++i;
    }
    return out;
}

std::string_view to_string(Field f) noexcept {
    switch (f) {
        case Field::OriginatesFrom: return "OriginatesFrom";
        case Field::TargetCountry: return "TargetCountry";
        case Field::TargetRegion: return "TargetRegion";
        case Field::TargetSector: return "TargetSector";
        case Field::Motivation: return "Motivation";
        case Field::UsesTechnique: return "UsesTechnique";
        case Field::UsesSoftware: return "UsesSoftware";
        case Field::Name: return "Name";
    }
    return "Name";
}

std::optional<Field> field_from(std::string_view name) noexcept {
    for (auto f : {Field::OriginatesFrom, Field::TargetCountry, Field::TargetRegion, Field::TargetSector,
                   Field::Motivation, Field::UsesTechnique, Field::UsesSoftware, Field::Name})
        if (text::iequals(name, to_string(f))) return f;
    return std::nullopt;
}

Value canonical_value(Field f, std::string_view surface, const Gazetteer& g, std::size_t offset) {
    Value v{std::string(surface), {}, true};
    const auto trimmed = text::trim(surface);
    switch (f) {
        case Field::OriginatesFrom:
        case Field::TargetCountry:
            if (auto c = g.lookup(VocabKind::country, trimmed)) {
                v.canonical = *c;
            } else if (trimmed.size() == 2 && std::isalpha(static_cast<unsigned char>(trimmed[0])) &&
                       std::isalpha(static_cast<unsigned char>(trimmed[1]))) {
                v.canonical = text::upper(trimmed);
            } else {
                v.canonical = text::upper(trimmed);
                v.known = false;
            }
            break;
        case Field::TargetRegion:
        case Field::TargetSector:
        case Field::Motivation: {
            const auto kind = f == Field::TargetRegion   ? VocabKind::region
                              : f == Field::TargetSector ? VocabKind::sector
                                                         : VocabKind::motivation;
            if (auto t = g.lookup(kind, trimmed)) {
                v.canonical = *t;
            } else {
                v.canonical = text::hyphenate(trimmed);
                v.known = f == Field::TargetRegion     ? is_standard_region(v.canonical)
                          : f == Field::TargetSector   ? is_standard_sector(v.canonical)
                                                       : is_standard_motivation(v.canonical);
            }
            break;
        }
        case Field::UsesTechnique:
            v.canonical = text::upper(trimmed);
            if (!stix::is_technique_code(v.canonical))
                throw SyntaxError(offset, "technique id T#### or T####.###", "\"" + v.surface + "\"");
            break;
        case Field::UsesSoftware: {
            const auto up = text::upper(trimmed);
            v.canonical = stix::is_software_code(up) ? up : std::string(trimmed);
            break;
        }
        case Field::Name:
            v.canonical = std::string(trimmed);
            break;
    }
    return v;
}

ExprPtr make_predicate(Predicate p) {
    return std::make_shared<const Expr>(Expr{Expr::Kind::predicate, std::move(p), nullptr, nullptr});
}
ExprPtr make_and(ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<const Expr>(Expr{Expr::Kind::conj, {}, std::move(lhs), std::move(rhs)});
}
ExprPtr make_or(ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<const Expr>(Expr{Expr::Kind::disj, {}, std::move(lhs), std::move(rhs)});
}
ExprPtr make_not(ExprPtr e) {
    return std::make_shared<const Expr>(Expr{Expr::Kind::negation, {}, std::move(e), nullptr});
}

std::string to_string(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::predicate: {
            const auto& p = e.predicate;
            std::string s = "Pred(" + std::string(to_string(p.field)) + "," +
                            (p.op == Op::eq ? "eq" : "in") + ",";
            for (std::size_t i = 0; i < p.values.size(); ++i) {
                if (i) s += "|";
                s += p.values[i].canonical;
            }
            return s + ")";
        }
        case Expr::Kind::conj: return "And(" + to_string(*e.lhs) + "," + to_string(*e.rhs) + ")";
        case Expr::Kind::disj: return "Or(" + to_string(*e.lhs) + "," + to_string(*e.rhs) + ")";
        case Expr::Kind::negation: return "Not(" + to_string(*e.lhs) + ")";
    }
    return {};
}

ExprPtr parse_query(std::span<const Token> tokens, const Gazetteer& g, std::optional<std::size_t> source_length) {
    const std::size_t end =
        source_length.value_or(tokens.empty() ? 0 : tokens.back().offset + tokens.back().length);
    return Parser(tokens, g, end).parse();
}

ExprPtr parse_query(std::string_view text, const Gazetteer& g) {
    const auto tokens = tokenize(text);
    return parse_query(tokens, g, text.size());
}

QueryResult evaluate(const Expr& e, const KnowledgeGraph& g, const EvalOptions& options) {
    Evaluator ev(g, options);
    const IdSet hits = ev.eval(e);

    struct Row {
        std::string attack_id;
        StixId id;
        std::string name;
    };
    std::vector<Row> rows;
    for (const auto& id : hits) {
        const auto& is = *g.find(id)->get_if<stix::IntrusionSet>();
        rows.push_back({safe_attack_id(is.common).value_or(""), id, is.common.name.value_or("")});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.attack_id != b.attack_id ? a.attack_id < b.attack_id : a.id < b.id;
    });

    QueryResult r;
    for (auto& row : rows) {
        r.ids.push_back(row.id);
        r.names.push_back(std::move(row.name));
        r.attack_ids.push_back(std::move(row.attack_id));
    }
    r.warnings = std::move(ev.warnings);
    return r;
}

}  // namespace groupkb::query
