#pragma once

/// @file library.hpp
/// @brief Procedure notation parsing (canonical and Westgard) and the built-in reference
/// library of alternative QC procedures.
///
/// Canonical grammar, AND binding tighter than OR when unparenthesized:
///
///     expr := term (op term)* ;  term := RULE | '(' expr ')'
///     RULE := ('S'|'R'|'M'|'D') '(' int ',' decimal ')' ;  op := 'AND' | 'OR'
///
/// Westgard grammar: `term ('/' term)*` with terms `<count>_<limit>s` (all of the last
/// `count` values beyond `limit` SD, i.e. S(count, limit)) or `R_<limit>s` (R(2, limit)),
/// joined by OR. Same-side requirements of classical Westgard rules are not modelled: the
/// generic rules compare absolute values.

#include <cctype>
#include <cstdio>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qcga/errors.hpp"
#include "qcga/rules.hpp"

namespace qcga {

namespace detail {

struct Ast {
    bool leaf = true;
    Rule rule;
    OpKind op = OpKind::Or;
    std::vector<std::unique_ptr<Ast>> kids;  // n-ary for internal nodes
};

class CanonicalParser {
public:
    explicit CanonicalParser(std::string_view text) : text_(text) {}

    std::unique_ptr<Ast> parse() {
        auto root = parse_or();
        skip_space();
        if (pos_ != text_.size()) throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
        return root;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept_keyword(std::string_view kw) {
        skip_space();
        if (text_.size() - pos_ < kw.size()) return false;
        for (std::size_t i = 0; i < kw.size(); ++i)
            if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
        const std::size_t end = pos_ + kw.size();
        if (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) return false;
        pos_ = end;
        return true;
    }

    void expect(char c) {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != c) throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    std::unique_ptr<Ast> join(OpKind op, std::unique_ptr<Ast> lhs, std::unique_ptr<Ast> rhs) {
        auto node = std::make_unique<Ast>();
        node->leaf = false;
        node->op = op;
        for (auto* part : {&lhs, &rhs}) {
            if (!(*part)->leaf && (*part)->op == op) {
                for (auto& k : (*part)->kids) node->kids.push_back(std::move(k));
            } else {
                node->kids.push_back(std::move(*part));
            }
        }
        return node;
    }

    std::unique_ptr<Ast> parse_or() {
        auto lhs = parse_and();
        while (accept_keyword("OR")) lhs = join(OpKind::Or, std::move(lhs), parse_and());
        return lhs;
    }

    std::unique_ptr<Ast> parse_and() {
        auto lhs = parse_term();
        while (accept_keyword("AND")) lhs = join(OpKind::And, std::move(lhs), parse_term());
        return lhs;
    }

    std::unique_ptr<Ast> parse_term() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of text", pos_);
        if (text_[pos_] == '(') {
            ++pos_;
            auto inner = parse_or();
            expect(')');
            return inner;
        }
        return parse_rule();
    }

    double parse_number(bool integer) {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                       (!integer && text_[pos_] == '.')))
            ++pos_;
        if (start == pos_) throw ParseError(integer ? "expected integer" : "expected decimal", start);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_) throw ParseError("malformed number", start);
        return value;
    }

    std::unique_ptr<Ast> parse_rule() {
        const std::size_t start = pos_;
        RuleKind kind;
        switch (std::toupper(static_cast<unsigned char>(text_[pos_]))) {
        case 'S': kind = RuleKind::SingleValue; break;
        case 'R': kind = RuleKind::Range; break;
        case 'M': kind = RuleKind::Mean; break;
        case 'D': kind = RuleKind::StdDev; break;
        default: throw ParseError("expected rule S, R, M or D", pos_);
        }
        ++pos_;
        expect('(');
        const double n = parse_number(true);
        expect(',');
        const double limit = parse_number(false);
        expect(')');
        auto node = std::make_unique<Ast>();
        node->rule = Rule{kind, static_cast<int>(n), limit};
        if (n > kMaxWindow || !within_bounds(node->rule))
            throw UnsupportedRule("rule " + to_string(node->rule) + " at position " + std::to_string(start) +
                                  " is outside the generic-rule bounds");
        return node;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

// Flattens an n-ary AST into a left-associated rule/operator sequence. A connective gets
// priority p; its left operand keeps p, its right operand p + 1.
inline void emit(const Ast& node, int priority, Procedure& out) {
    if (node.leaf) {
        out.rules.push_back(node.rule);
        return;
    }
    if (priority > kMaxPriority) throw UnsupportedRule("expression nests deeper than four operator priorities");
    emit(*node.kids[0], priority, out);
    for (std::size_t i = 1; i < node.kids.size(); ++i) {
        out.operators.push_back({node.op, priority});
        const Ast& kid = *node.kids[i];
        emit(kid, kid.leaf ? priority : priority + 1, out);
    }
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline Rule parse_westgard_term(std::string_view term, std::size_t offset) {
    const std::size_t underscore = term.find('_');
    if (underscore == std::string_view::npos || underscore == 0)
        throw ParseError("expected <count>_<limit>s or R_<limit>s", offset);
    const std::string_view head = term.substr(0, underscore);
    std::string_view tail = term.substr(underscore + 1);
    if (tail.empty()) throw ParseError("missing limit", offset + underscore + 1);
    if (tail == "x" || tail == "X") throw UnsupportedRule(std::string(term) + " (mean-side counting rule) is not expressible with the generic rules");
    if (tail.back() != 's' && tail.back() != 'S') throw ParseError("limit must end with 's'", offset + term.size() - 1);
    tail.remove_suffix(1);

    double limit = 0.0;
    {
        const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), limit);
        if (ec != std::errc() || ptr != tail.data() + tail.size() || tail.empty())
            throw ParseError("malformed limit", offset + underscore + 1);
    }

    Rule rule;
    if (head == "R" || head == "r") {
        rule = {RuleKind::Range, 2, limit};
    } else {
        int count = 0;
        const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), count);
        if (ec != std::errc() || ptr != head.data() + head.size()) throw ParseError("malformed count", offset);
        rule = {RuleKind::SingleValue, count, limit};
    }
    if (!within_bounds(rule))
        throw UnsupportedRule(std::string(term) + " is outside the generic-rule bounds");
    return rule;
}

inline Procedure parse_westgard(std::string_view text) {
    Procedure proc;
    std::size_t start = 0;
    while (true) {
        const std::size_t slash = text.find('/', start);
        const std::size_t end = slash == std::string_view::npos ? text.size() : slash;
        std::string_view raw = text.substr(start, end - start);
        std::size_t lead = 0;
        while (lead < raw.size() && std::isspace(static_cast<unsigned char>(raw[lead]))) ++lead;
        const std::string term = trim(raw);
        if (term.empty()) throw ParseError("empty term", start);
        if (!proc.rules.empty()) proc.operators.push_back({OpKind::Or, 0});
        proc.rules.push_back(parse_westgard_term(term, start + lead));
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    return proc;
}

} // namespace detail

/// Parses canonical or Westgard notation; "NONE" is the empty (never-reject) procedure.
inline Procedure parse_procedure(std::string_view text) {
    const std::string trimmed = detail::trim(text);
    if (trimmed.empty()) throw ParseError("empty procedure text", 0);
    std::string upper = trimmed;
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (upper == "NONE") return {};
    if (text.find('_') != std::string_view::npos) return detail::parse_westgard(text);

    detail::CanonicalParser parser(text);
    const auto ast = parser.parse();
    Procedure proc;
    detail::emit(*ast, 0, proc);
    return proc;
}

enum class LibrarySource : std::uint8_t { Builtin, UserFile };

struct LibraryEntry {
    std::string name;
    Procedure procedure;
    LibrarySource source = LibrarySource::Builtin;
    std::string note;
};

/// Reference procedures reconstructable from the reference comparison.
inline std::vector<LibraryEntry> builtin_library() {
    std::vector<LibraryEntry> lib;
    auto add = [&](const std::string& name, const std::string& note) {
        lib.push_back({name, parse_procedure(name), LibrarySource::Builtin, note});
    };
    for (int k = 0; k <= 20; ++k) {
        char name[16];
        std::snprintf(name, sizeof name, "1_%.1fs", 2.0 + 0.1 * k);
        add(name, "single-value sweep, limit 2.0 + 0.1k");
    }
    add("1_3.0s/2_2.0s/R_4.0s", "listed reference multirule");
    add("1_2.5s/2_2.0s", "comparison-table library row");
    add("1_2.5s/2_2.0s/R_4s", "comparison-table library row");
    add("1_2.5s/2_2.0s/4_1s", "comparison-table library row");
    add("1_2.5s/2_2.0s/R_4s/4_1s", "comparison-table library row");
    add("1_3s/2_2s/R_4s/4_1s",
        "Westgard multirule without its 10_x term (not expressible with generic rules); "
        "2_2s and 4_1s use absolute values, not same-side runs");
    return lib;
}

/// Reads `name = notation` lines; '#' starts a comment, blank lines are skipped.
inline std::vector<LibraryEntry> parse_library(std::istream& in, const std::string& origin = "<library>") {
    std::vector<LibraryEntry> lib;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string content = detail::trim(line);
        if (content.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(origin + ":" + std::to_string(line_no) + ": expected 'name = notation'", 0);
        const std::string name = detail::trim(std::string_view(line).substr(0, eq));
        if (name.empty()) throw ParseError(origin + ":" + std::to_string(line_no) + ": empty name", 0);
        try {
            lib.push_back({name, parse_procedure(std::string_view(line).substr(eq + 1)), LibrarySource::UserFile,
                           origin + ":" + std::to_string(line_no)});
        } catch (const ParseError& e) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": " + e.reason(), eq + 1 + e.position());
        }
    }
    return lib;
}

inline std::vector<LibraryEntry> load_library_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open library file " + path);
    return parse_library(in, path);
}

} // namespace qcga
