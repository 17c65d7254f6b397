// parser.cpp - recursive-descent math grammar
//
// One function per precedence level: relation chains, then additive, then
// term (factor juxtaposition), then factor (primary plus scripts).  The
// parser never throws to callers; parse_math catches the internal
// Unparseable signal and reports it as a ParseOutcome error.
//
// Everything built here is emission-stable: wherever the emitter would be
// forced to insert parentheses (a negated factor after \cdot, an applied
// function used as a power base, a multi-factor derivative operand), the
// parser inserts the Group node up front, so canonical(parse(s)) == parse(s).

#include "zero2hero/parser.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "zero2hero/emitter.hpp"
#include "zero2hero/lexer.hpp"

namespace z2h {

namespace {

struct Unparseable {
    std::string reason;
    std::size_t offset;
};

[[noreturn]] void fail(std::string reason, std::size_t offset) {
    throw Unparseable{std::move(reason), offset};
}

// ============================================================================
// Command classification tables
// ============================================================================

constexpr std::array<std::string_view, 15> kFunctionCmds = {
    "sin", "cos", "tan",    "cot",    "sec",    "csc",  "arcsin", "arccos",
    "arctan", "sinh", "cosh", "tanh", "ln",     "log",  "exp",
};

constexpr std::array<std::string_view, 16> kSizedDelimCmds = {
    "big",   "Big",   "bigg",  "Bigg",  "bigl",  "bigr",  "Bigl",  "Bigr",
    "biggl", "biggr", "Biggl", "Biggr", "bigm",  "Bigm",  "biggm", "Biggm",
};

constexpr std::array<std::string_view, 10> kStyleCmds = {
    "mathcal", "mathbb",   "mathbf",     "mathrm", "mathsf",
    "mathit",  "mathfrak", "mathscr",    "boldsymbol", "bm",
};

// Commands that only adjust spacing or layout; the grammar skips them like
// whitespace.
constexpr std::array<std::string_view, 11> kSpacingCmds = {
    ",", ";", ":", "!", " ", "quad", "qquad", "limits", "nolimits",
    "displaystyle", "textstyle",
};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& table, std::string_view name) {
    return std::find(table.begin(), table.end(), name) != table.end();
}

std::optional<AccentKind> accent_of(std::string_view name) {
    if (name == "hat") return AccentKind::Hat;
    if (name == "bar") return AccentKind::Bar;
    if (name == "tilde") return AccentKind::Tilde;
    return std::nullopt;
}

std::optional<RelKind> relation_cmd(std::string_view name) {
    if (name == "le" || name == "leq") return RelKind::Le;
    if (name == "ge" || name == "geq") return RelKind::Ge;
    if (name == "ne" || name == "neq") return RelKind::Ne;
    if (name == "approx") return RelKind::Approx;
    if (name == "equiv") return RelKind::Equiv;
    if (name == "sim") return RelKind::Sim;
    if (name == "propto") return RelKind::Propto;
    return std::nullopt;
}

std::optional<RelKind> relation_op(char c) {
    if (c == '=') return RelKind::Eq;
    if (c == '<') return RelKind::Lt;
    if (c == '>') return RelKind::Gt;
    return std::nullopt;
}

bool is_identifier_node(const ExprPtr& e) {
    return e && (std::holds_alternative<Symbol>(e->node) || std::holds_alternative<Greek>(e->node));
}

// Bare differential marker: the letter d with no decorations.
bool is_plain_d(const ExprPtr& e) {
    auto* s = std::get_if<Symbol>(&e->node);
    return s && s->name == "d" && !s->sub && !s->style && !s->accent;
}

bool pow_base_ok(const ExprPtr& e) {
    return std::holds_alternative<Number>(e->node) || std::holds_alternative<Symbol>(e->node) ||
           std::holds_alternative<Greek>(e->node) || std::holds_alternative<Constant>(e->node) ||
           std::holds_alternative<Opaque>(e->node) || std::holds_alternative<Mark>(e->node) ||
           std::holds_alternative<Group>(e->node) || std::holds_alternative<Fraction>(e->node);
}

void flatten_juxt(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (auto* b = std::get_if<BinOp>(&e->node); b && b->op == BinKind::ImplicitMul) {
        flatten_juxt(b->lhs, out);
        out.push_back(b->rhs);
        return;
    }
    out.push_back(e);
}

// ============================================================================
// Parser
// ============================================================================

class Parser {
public:
    Parser(std::string_view src, std::vector<Token> toks)
        : src_(src), toks_(std::move(toks)), end_(toks_.size()) {}

    ExprPtr parse_document();

private:
    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
    // Inside an application's argument list a comma separates arguments;
    // everywhere else it is a display atom.  Group parses reset the flag.
    bool comma_separates_ = false;

    struct CommaScope {
        Parser& p;
        bool saved;
        CommaScope(Parser& parser, bool value) : p(parser), saved(parser.comma_separates_) {
            p.comma_separates_ = value;
        }
        ~CommaScope() { p.comma_separates_ = saved; }
    };

    struct RangeScope {
        Parser& p;
        std::size_t saved_pos, saved_end;
        RangeScope(Parser& parser, std::size_t b, std::size_t e)
            : p(parser), saved_pos(parser.pos_), saved_end(parser.end_) {
            p.pos_ = b;
            p.end_ = e;
        }
        ~RangeScope() {
            p.pos_ = saved_pos;
            p.end_ = saved_end;
        }
    };

    // -- cursor ---------------------------------------------------------------

    bool at_end() const { return pos_ >= end_; }
    const Token& cur() const { return toks_[pos_]; }
    void advance() { ++pos_; }

    std::size_t cur_offset() const {
        if (!at_end()) return cur().offset;
        if (end_ < toks_.size()) return toks_[end_].offset;
        return src_.size();
    }

    bool tok_is(TokKind k) const { return !at_end() && cur().kind == k; }
    bool op_is(std::string_view s) const {
        return tok_is(TokKind::Op) && cur().text == s;
    }
    bool cmd_is(std::string_view s) const {
        return tok_is(TokKind::Cmd) && cur().text == s;
    }

    void skip() {
        while (!at_end() && (cur().kind == TokKind::Space ||
                             (cur().kind == TokKind::Cmd && contains(kSpacingCmds, cur().text))))
            advance();
    }

    // -- token-level predicates (assume skip() was just called) ---------------

    bool is_rel_op(RelKind* out) const {
        if (at_end()) return false;
        if (cur().kind == TokKind::Op && cur().text.size() == 1) {
            if (auto r = relation_op(cur().text[0])) {
                if (out) *out = *r;
                return true;
            }
            return false;
        }
        if (cur().kind == TokKind::Cmd) {
            if (auto r = relation_cmd(cur().text)) {
                if (out) *out = *r;
                return true;
            }
        }
        return false;
    }

    bool factor_start() const {
        if (at_end()) return false;
        const Token& t = cur();
        switch (t.kind) {
        case TokKind::Number:
        case TokKind::Letter:
        case TokKind::LBrace:
        case TokKind::Raw:
            return true;
        case TokKind::Punct:
            return !(comma_separates_ && t.text == ",");
        case TokKind::Op:
            return t.text == "(" || t.text == "[" || t.text == "|";
        case TokKind::Cmd: {
            const std::string& n = t.text;
            if (contains(kSpacingCmds, n)) return false;
            if (n == "right" || n == "end" || n == "cdot" || n == "times") return false;
            if (relation_cmd(n)) return false;
            return true;
        }
        default:
            return false;
        }
    }

    bool can_start_additive() const {
        if (factor_start()) return true;
        return !at_end() && cur().kind == TokKind::Op && (cur().text == "+" || cur().text == "-");
    }

    // -- grammar levels --------------------------------------------------------

    ExprPtr parse_chunk(std::size_t b, std::size_t e);
    ExprPtr parse_relation();
    ExprPtr parse_additive();
    ExprPtr parse_term(ExprPtr first);
    ExprPtr parse_mul_operand();
    ExprPtr parse_factor();
    ExprPtr parse_primary();
    ExprPtr parse_command();
    ExprPtr parse_script_arg();
    int parse_integer_script();
    ExprPtr attach_subscript(ExprPtr base, ExprPtr sub, std::size_t at);
    ExprPtr try_subscript();
    ExprPtr parse_ident_atom();
    bool at_application_open();
    std::vector<ExprPtr> parse_paren_args();
    ExprPtr parse_paren_group(BracketKind kind, std::string_view closer);
    ExprPtr parse_cmd_function(const std::string& cmd);
    ExprPtr parse_frac();
    ExprPtr parse_partial(std::size_t nb, std::size_t ne, std::size_t db, std::size_t de);
    ExprPtr parse_reduction(BigOpKind kind);
    ExprPtr parse_integral(BigOpKind kind);
    ExprPtr parse_left_group();
    ExprPtr parse_sized_delim();
    ExprPtr parse_accented(AccentKind kind);
    ExprPtr parse_styled();
    ExprPtr parse_inner_environment();
    ExprPtr parse_opaque_command();

    // -- range helpers -----------------------------------------------------------

    std::pair<std::size_t, std::size_t> brace_range();
    ExprPtr parse_range(std::size_t b, std::size_t e);
    bool range_starts_with_cmd(std::size_t b, std::size_t e, std::string_view name) const;
};

// -- top level -----------------------------------------------------------------

ExprPtr Parser::parse_document() {
    skip();
    if (at_end()) fail("empty equation", 0);

    std::optional<std::string> env;
    std::size_t content_begin = pos_;
    std::size_t content_end = end_;

    // Peel a split/aligned wrapper that spans the entire segment.
    if (cmd_is("begin")) {
        std::size_t j = pos_ + 1;
        while (j < end_ && toks_[j].kind == TokKind::Space) ++j;
        if (j < end_ && toks_[j].kind == TokKind::LBrace) {
            std::string name;
            std::size_t k = j + 1;
            while (k < end_ && (toks_[k].kind == TokKind::Letter ||
                                (toks_[k].kind == TokKind::Op && toks_[k].text == "*"))) {
                name += toks_[k].text;
                ++k;
            }
            if (k < end_ && toks_[k].kind == TokKind::RBrace &&
                (name == "split" || name == "aligned")) {
                // Find the matching \end, counting nested environments.
                int depth = 0;
                std::size_t close = end_;
                for (std::size_t i = pos_; i < end_; ++i) {
                    if (toks_[i].kind != TokKind::Cmd) continue;
                    if (toks_[i].text == "begin") ++depth;
                    else if (toks_[i].text == "end" && --depth == 0) {
                        close = i;
                        break;
                    }
                }
                if (close != end_) {
                    // Swallow the {name} after \end and require only space
                    // beyond it; otherwise this is not a whole-segment wrapper.
                    std::size_t m = close + 1;
                    while (m < end_ && toks_[m].kind == TokKind::Space) ++m;
                    if (m < end_ && toks_[m].kind == TokKind::LBrace) {
                        int braces = 0;
                        while (m < end_) {
                            if (toks_[m].kind == TokKind::LBrace) ++braces;
                            else if (toks_[m].kind == TokKind::RBrace && --braces == 0) break;
                            ++m;
                        }
                        std::size_t t = m + 1;
                        while (t < end_ && toks_[t].kind == TokKind::Space) ++t;
                        if (m < end_ && t == end_) {
                            env = name;
                            content_begin = k + 1;
                            content_end = close;
                        }
                    }
                }
            }
        }
    }

    // Split into rows at \\ and cells at & — lexically, at zero nesting.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> grid;
    grid.emplace_back();
    std::size_t chunk_start = content_begin;
    int depth = 0;
    for (std::size_t i = content_begin; i < content_end; ++i) {
        const Token& t = toks_[i];
        if (t.kind == TokKind::LBrace) ++depth;
        else if (t.kind == TokKind::RBrace) { if (depth > 0) --depth; }
        else if (t.kind == TokKind::Cmd && (t.text == "left" || t.text == "begin")) ++depth;
        else if (t.kind == TokKind::Cmd && (t.text == "right" || t.text == "end")) {
            if (depth > 0) --depth;
        } else if (depth == 0 && t.kind == TokKind::Amp) {
            grid.back().emplace_back(chunk_start, i);
            chunk_start = i + 1;
        } else if (depth == 0 && t.kind == TokKind::RowBreak) {
            grid.back().emplace_back(chunk_start, i);
            grid.emplace_back();
            chunk_start = i + 1;
        }
    }
    grid.back().emplace_back(chunk_start, content_end);

    Rows node{env, {}};
    for (const auto& row_ranges : grid) {
        Row row;
        for (const auto& [b, e] : row_ranges) row.chunks.push_back(parse_chunk(b, e));
        node.rows.push_back(std::move(row));
    }
    if (!env && node.rows.size() == 1 && node.rows[0].chunks.size() == 1) {
        ExprPtr only = node.rows[0].chunks[0];
        if (!only) fail("empty equation", 0);
        return only;
    }
    return make_expr(std::move(node));
}

ExprPtr Parser::parse_chunk(std::size_t b, std::size_t e) {
    RangeScope rs(*this, b, e);
    CommaScope cs(*this, false);
    skip();
    if (at_end()) return nullptr;
    ExprPtr expr = parse_relation();
    skip();
    if (!at_end()) fail("unexpected token", cur().offset);
    if (!expr) fail("unexpected token", cur_offset());
    return expr;
}

// -- precedence levels -----------------------------------------------------------

ExprPtr Parser::parse_relation() {
    skip();
    std::vector<ExprPtr> operands;
    std::vector<RelKind> ops;
    RelKind rk;
    if (is_rel_op(&rk)) {
        operands.push_back(nullptr);
    } else if (can_start_additive()) {
        operands.push_back(parse_additive());
    } else {
        return nullptr;
    }
    for (;;) {
        skip();
        if (!is_rel_op(&rk)) break;
        advance();
        ops.push_back(rk);
        skip();
        if (can_start_additive()) operands.push_back(parse_additive());
        else operands.push_back(nullptr);
    }
    if (ops.empty()) return operands[0];
    return make_expr(Relation{std::move(operands), std::move(ops)});
}

ExprPtr Parser::parse_additive() {
    skip();
    ExprPtr acc;
    if (op_is("+")) {
        // A leading plus (continuation rows, explicit signs) is preserved as
        // a display atom heading the factor chain, so it survives emission.
        advance();
        acc = parse_term(make_mark(MarkKind::Punct, "+"));
    } else if (op_is("-")) {
        advance();
        acc = make_neg(parse_term(nullptr));
    } else {
        acc = parse_term(nullptr);
    }
    for (;;) {
        skip();
        if (op_is("+")) {
            advance();
            acc = make_binop(BinKind::Add, acc, parse_term(nullptr));
        } else if (op_is("-")) {
            advance();
            acc = make_binop(BinKind::Sub, acc, parse_term(nullptr));
        } else {
            break;
        }
    }
    return acc;
}

ExprPtr Parser::parse_term(ExprPtr first) {
    ExprPtr acc = first ? std::move(first) : parse_factor();
    for (;;) {
        skip();
        if (cmd_is("cdot") || cmd_is("times") || op_is("*")) {
            advance();
            acc = make_binop(BinKind::Mul, acc, parse_mul_operand());
        } else if (op_is("/")) {
            advance();
            acc = make_binop(BinKind::Div, acc, parse_mul_operand());
        } else if (factor_start()) {
            acc = make_binop(BinKind::ImplicitMul, acc, parse_factor());
        } else {
            break;
        }
    }
    return acc;
}

// Right operand of an explicit \cdot, \times or /.  A leading minus is legal
// here and normalizes to a parenthesized negation so emission is stable.
ExprPtr Parser::parse_mul_operand() {
    skip();
    if (op_is("-")) {
        advance();
        return make_group(BracketKind::Paren, make_neg(parse_factor()));
    }
    return parse_factor();
}

ExprPtr Parser::parse_factor() {
    skip();
    if (!factor_start()) fail("expected expression", cur_offset());
    ExprPtr primary = parse_primary();
    ExprPtr power;
    for (;;) {
        skip();
        if (tok_is(TokKind::Sub)) {
            std::size_t at = cur().offset;
            advance();
            primary = attach_subscript(std::move(primary), parse_script_arg(), at);
        } else if (tok_is(TokKind::Sup)) {
            if (power) fail("double superscript", cur().offset);
            advance();
            power = parse_script_arg();
        } else if (!power && is_identifier_node(primary) && at_application_open()) {
            primary = make_applied(std::move(primary), parse_paren_args());
        } else {
            break;
        }
    }
    if (power) {
        if (auto* c = std::get_if<Constant>(&primary->node); c && c->kind == ConstKind::EulerE)
            return make_function("exp", {std::move(power)});
        if (!pow_base_ok(primary)) primary = make_group(BracketKind::Paren, std::move(primary));
        return make_binop(BinKind::Pow, std::move(primary), std::move(power));
    }
    return primary;
}

ExprPtr Parser::attach_subscript(ExprPtr base, ExprPtr sub, std::size_t at) {
    if (auto* s = std::get_if<Symbol>(&base->node)) {
        if (s->sub) fail("double subscript", at);
        return make_symbol(s->name, std::move(sub), s->accent, s->style);
    }
    if (auto* g = std::get_if<Greek>(&base->node)) {
        if (g->sub) fail("double subscript", at);
        return make_greek(g->name, std::move(sub), g->accent, g->style);
    }
    if (auto* c = std::get_if<Constant>(&base->node)) {
        // A subscripted e or h is an indexed variable, not the constant.
        if (c->kind == ConstKind::EulerE) return make_symbol("e", std::move(sub));
        if (c->kind == ConstKind::PlanckH) return make_symbol("h", std::move(sub));
        fail("subscript on constant", at);
    }
    fail("subscript on non-identifier", at);
}

ExprPtr Parser::try_subscript() {
    skip();
    if (!tok_is(TokKind::Sub)) return nullptr;
    advance();
    return parse_script_arg();
}

ExprPtr Parser::parse_ident_atom() {
    skip();
    if (tok_is(TokKind::Letter)) {
        std::string n = cur().text;
        advance();
        return make_symbol(std::move(n), try_subscript());
    }
    if (tok_is(TokKind::Cmd) && is_greek_command(cur().text)) {
        std::string n = cur().text;
        advance();
        return make_greek(std::move(n), try_subscript());
    }
    fail("expected identifier", cur_offset());
}

bool Parser::at_application_open() {
    if (op_is("(")) return true;
    if (!cmd_is("left")) return false;
    std::size_t j = pos_ + 1;
    while (j < end_ && toks_[j].kind == TokKind::Space) ++j;
    return j < end_ && toks_[j].kind == TokKind::Op && toks_[j].text == "(";
}

// Argument list behind '(' or '\left(' — cursor sits on the opener.
std::vector<ExprPtr> Parser::parse_paren_args() {
    bool sized = cmd_is("left");
    if (sized) {
        advance();
        skip();
    }
    advance(); // '('
    std::vector<ExprPtr> args;
    {
        CommaScope cs(*this, true);
        for (;;) {
            ExprPtr a = parse_relation();
            if (!a) fail("expected expression", cur_offset());
            args.push_back(std::move(a));
            skip();
            if (tok_is(TokKind::Punct) && cur().text == ",") {
                advance();
                continue;
            }
            break;
        }
    }
    skip();
    if (sized) {
        if (!cmd_is("right")) fail("unterminated group", cur_offset());
        advance();
        skip();
    }
    if (!op_is(")")) fail("unterminated group", cur_offset());
    advance();
    return args;
}

ExprPtr Parser::parse_script_arg() {
    skip();
    if (at_end()) fail("malformed script", cur_offset());
    if (tok_is(TokKind::LBrace)) {
        advance();
        CommaScope cs(*this, false);
        ExprPtr inner = parse_relation(); // may be null: x_{} means no script
        skip();
        if (!tok_is(TokKind::RBrace)) fail("unterminated group", cur_offset());
        advance();
        return inner;
    }
    if (tok_is(TokKind::Number)) {
        // Unbraced scripts take a single token, and a digit run splits: x^21
        // raises to the 2 and multiplies by 1.
        std::string text = cur().text;
        if (text.size() > 1) {
            toks_[pos_].text.erase(0, 1);
            toks_[pos_].offset += 1;
            return make_number(text.substr(0, 1));
        }
        advance();
        return make_number(std::move(text));
    }
    if (tok_is(TokKind::Letter)) {
        std::string name = cur().text;
        advance();
        if (name == "e") return make_constant(ConstKind::EulerE);
        if (name == "h") return make_constant(ConstKind::PlanckH);
        return make_symbol(std::move(name));
    }
    if (tok_is(TokKind::Cmd)) {
        std::string name = cur().text;
        if (is_greek_command(name)) {
            advance();
            return make_greek(std::move(name));
        }
        if (name == "pi") {
            advance();
            return make_constant(ConstKind::Pi);
        }
        if (name == "hbar") {
            advance();
            return make_constant(ConstKind::HBar);
        }
        if (name == "frac") return parse_frac();
        advance();
        return make_opaque("\\" + name);
    }
    fail("malformed script", cur_offset());
}

int Parser::parse_integer_script() {
    std::size_t at = cur_offset();
    ExprPtr e = parse_script_arg();
    if (e) {
        if (auto* n = std::get_if<Number>(&e->node)) {
            if (!n->text.empty() && n->text.size() <= 4 &&
                n->text.find('.') == std::string::npos) {
                int v = std::stoi(n->text);
                if (v >= 1) return v;
            }
        }
    }
    fail("malformed script", at);
}

// -- primaries -------------------------------------------------------------------

ExprPtr Parser::parse_primary() {
    const Token& t = cur();
    switch (t.kind) {
    case TokKind::Number: {
        std::string x = t.text;
        advance();
        return make_number(std::move(x));
    }
    case TokKind::Letter: {
        std::string n = t.text;
        advance();
        if (n == "e") return make_constant(ConstKind::EulerE);
        if (n == "h") return make_constant(ConstKind::PlanckH);
        return make_symbol(std::move(n));
    }
    case TokKind::Raw:
    case TokKind::Punct: {
        std::string x = t.text;
        advance();
        return make_mark(MarkKind::Punct, std::move(x));
    }
    case TokKind::LBrace: {
        std::size_t at = t.offset;
        advance();
        CommaScope cs(*this, false);
        ExprPtr inner = parse_relation();
        skip();
        if (!tok_is(TokKind::RBrace)) fail("unterminated group", cur_offset());
        advance();
        if (!inner) fail("empty group", at);
        return make_group(BracketKind::Paren, inner);
    }
    case TokKind::Op: {
        if (t.text == "(") return parse_paren_group(BracketKind::Paren, ")");
        if (t.text == "[") return parse_paren_group(BracketKind::Bracket, "]");
        if (t.text == "|") {
            advance();
            return make_mark(MarkKind::Punct, "|");
        }
        fail("unexpected token", t.offset);
    }
    case TokKind::Cmd:
        return parse_command();
    default:
        fail("unexpected token", t.offset);
    }
}

ExprPtr Parser::parse_paren_group(BracketKind kind, std::string_view closer) {
    std::size_t at = cur().offset;
    advance();
    CommaScope cs(*this, false);
    ExprPtr inner = parse_relation();
    skip();
    if (!op_is(closer)) fail("unterminated group", cur_offset());
    advance();
    if (!inner) fail("empty group", at);
    return make_group(kind, inner);
}

ExprPtr Parser::parse_command() {
    const std::string name = cur().text;
    if (is_greek_command(name)) {
        advance();
        return make_greek(name);
    }
    if (name == "pi") {
        advance();
        return make_constant(ConstKind::Pi);
    }
    if (name == "hbar") {
        advance();
        return make_constant(ConstKind::HBar);
    }
    if (contains(kFunctionCmds, name)) return parse_cmd_function(name);
    if (name == "frac") return parse_frac();
    if (name == "sum") return parse_reduction(BigOpKind::Sum);
    if (name == "prod") return parse_reduction(BigOpKind::Prod);
    if (name == "int") return parse_integral(BigOpKind::Integral);
    if (name == "oint") return parse_integral(BigOpKind::ContourIntegral);
    if (name == "left") return parse_left_group();
    if (contains(kSizedDelimCmds, name)) return parse_sized_delim();
    if (auto acc = accent_of(name)) return parse_accented(*acc);
    if (contains(kStyleCmds, name)) return parse_styled();
    if (name == "begin") return parse_inner_environment();
    return parse_opaque_command();
}

ExprPtr Parser::parse_cmd_function(const std::string& cmd) {
    const std::size_t at = cur().offset;
    advance();
    ExprPtr power;
    skip();
    if (tok_is(TokKind::Sup)) {
        advance();
        power = parse_script_arg();
        if (cmd == "exp") fail("malformed script", at);
    }
    skip();
    std::vector<ExprPtr> args;
    if (at_application_open()) {
        args = parse_paren_args();
    } else {
        ExprPtr arg = parse_factor();
        // \sin {x+1}: a braced argument group is the argument itself.
        if (auto* g = std::get_if<Group>(&arg->node); g && g->bracket == BracketKind::Paren)
            arg = g->inner;
        args.push_back(std::move(arg));
    }
    return make_function(cmd, std::move(args), std::move(power));
}

// -- fractions and derivatives -----------------------------------------------------

std::pair<std::size_t, std::size_t> Parser::brace_range() {
    std::size_t open_at = cur().offset;
    advance(); // '{'
    std::size_t b = pos_;
    int depth = 1;
    for (std::size_t i = pos_; i < end_; ++i) {
        if (toks_[i].kind == TokKind::LBrace) ++depth;
        else if (toks_[i].kind == TokKind::RBrace && --depth == 0) {
            pos_ = i + 1;
            return {b, i};
        }
    }
    fail("unterminated group", open_at);
}

ExprPtr Parser::parse_range(std::size_t b, std::size_t e) {
    RangeScope rs(*this, b, e);
    CommaScope cs(*this, false);
    skip();
    if (at_end()) return nullptr;
    ExprPtr expr = parse_relation();
    skip();
    if (!at_end()) fail("unexpected token", cur().offset);
    return expr;
}

bool Parser::range_starts_with_cmd(std::size_t b, std::size_t e, std::string_view name) const {
    for (std::size_t i = b; i < e; ++i) {
        if (toks_[i].kind == TokKind::Space) continue;
        if (toks_[i].kind == TokKind::Cmd && contains(kSpacingCmds, toks_[i].text)) continue;
        return toks_[i].kind == TokKind::Cmd && toks_[i].text == name;
    }
    return false;
}

ExprPtr Parser::parse_frac() {
    const std::size_t at = cur().offset;
    advance();
    skip();
    if (!tok_is(TokKind::LBrace)) {
        // \frac12 shorthand: each argument is one token.
        ExprPtr num = parse_script_arg();
        ExprPtr den = parse_script_arg();
        if (!num || !den) fail("malformed fraction", at);
        return make_fraction(std::move(num), std::move(den));
    }
    auto [nb, ne] = brace_range();
    skip();
    if (!tok_is(TokKind::LBrace)) fail("malformed fraction", cur_offset());
    auto [db, de] = brace_range();
    if (range_starts_with_cmd(nb, ne, "partial") && range_starts_with_cmd(db, de, "partial"))
        return parse_partial(nb, ne, db, de);
    ExprPtr num = parse_range(nb, ne);
    ExprPtr den = parse_range(db, de);
    if (!num || !den) fail("malformed fraction", at);
    return make_fraction(std::move(num), std::move(den));
}

ExprPtr Parser::parse_partial(std::size_t nb, std::size_t ne, std::size_t db, std::size_t de) {
    int order = 1;
    ExprPtr operand;
    bool operand_outside = false;
    {
        RangeScope rs(*this, nb, ne);
        CommaScope cs(*this, false);
        skip();
        advance(); // \partial
        skip();
        if (tok_is(TokKind::Sup)) {
            advance();
            order = parse_integer_script();
        }
        skip();
        if (at_end()) {
            operand_outside = true;
        } else {
            operand = parse_additive();
            skip();
            if (!at_end()) fail("unexpected token", cur().offset);
        }
    }
    ExprPtr wrt;
    {
        RangeScope rs(*this, db, de);
        CommaScope cs(*this, false);
        skip();
        advance(); // \partial
        wrt = parse_ident_atom();
        skip();
        if (tok_is(TokKind::Sup)) {
            // The denominator's power repeats the numerator's order.
            advance();
            (void)parse_integer_script();
            skip();
        }
        if (!at_end()) fail("unexpected token", cur().offset);
    }
    if (operand_outside) operand = parse_factor();
    else if (!parses_as_single_factor(operand, false))
        operand = make_group(BracketKind::Paren, std::move(operand));
    return make_partial(order, std::move(wrt), std::move(operand));
}

// -- big operators ----------------------------------------------------------------

ExprPtr Parser::parse_reduction(BigOpKind kind) {
    advance();
    ExprPtr bound, lower, upper;
    bool have_sub = false, have_sup = false;
    for (;;) {
        skip();
        if (tok_is(TokKind::Sub)) {
            if (have_sub) fail("double subscript", cur().offset);
            have_sub = true;
            advance();
            ExprPtr s = parse_script_arg();
            // \sum_{k=1}: an equality with an identifier on the left names
            // the bound variable.
            const Relation* r = s ? std::get_if<Relation>(&s->node) : nullptr;
            if (r && r->ops.size() == 1 && r->ops[0] == RelKind::Eq && r->operands[0] &&
                r->operands[1] && is_identifier_node(r->operands[0])) {
                bound = r->operands[0];
                lower = r->operands[1];
            } else {
                lower = s;
            }
        } else if (tok_is(TokKind::Sup)) {
            if (have_sup) fail("double superscript", cur().offset);
            have_sup = true;
            advance();
            upper = parse_script_arg();
        } else {
            break;
        }
    }
    ExprPtr body = parse_term(nullptr);
    return make_bigop(kind, std::move(bound), std::move(lower), std::move(upper), std::move(body));
}

ExprPtr Parser::parse_integral(BigOpKind kind) {
    const std::size_t at = cur().offset;
    advance();
    ExprPtr lower, upper;
    bool have_sub = false, have_sup = false;
    for (;;) {
        skip();
        if (tok_is(TokKind::Sub)) {
            if (have_sub) fail("double subscript", cur().offset);
            have_sub = true;
            advance();
            lower = parse_script_arg();
        } else if (tok_is(TokKind::Sup)) {
            if (have_sup) fail("double superscript", cur().offset);
            have_sup = true;
            advance();
            upper = parse_script_arg();
        } else {
            break;
        }
    }
    ExprPtr body = parse_term(nullptr);

    // Split the trailing differential (the last "d var" factor pair) off the
    // body's juxtaposition chain.
    std::vector<ExprPtr> chain;
    flatten_juxt(body, chain);
    std::ptrdiff_t di = -1;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(chain.size()) - 2; i >= 0; --i) {
        if (is_plain_d(chain[i]) && is_identifier_node(chain[i + 1])) {
            di = i;
            break;
        }
    }
    if (di < 0) fail("missing differential", at);
    ExprPtr var = chain[di + 1];
    chain.erase(chain.begin() + di, chain.begin() + di + 2);
    ExprPtr rebuilt;
    if (chain.empty()) {
        rebuilt = make_number("1");
    } else {
        rebuilt = chain[0];
        for (std::size_t i = 1; i < chain.size(); ++i)
            rebuilt = make_binop(BinKind::ImplicitMul, rebuilt, chain[i]);
    }
    return make_bigop(kind, nullptr, std::move(lower), std::move(upper), std::move(rebuilt),
                      std::move(var));
}

// -- delimiters, decorations, escape hatches ----------------------------------------

ExprPtr Parser::parse_left_group() {
    const std::size_t at = cur().offset;
    advance();
    skip();
    BracketKind kind;
    if (op_is("(")) kind = BracketKind::Paren;
    else if (op_is("[")) kind = BracketKind::Bracket;
    else if (op_is("|")) kind = BracketKind::Vert;
    else if (cmd_is("{")) kind = BracketKind::Brace;
    else fail("unsupported delimiter", cur_offset());
    advance();
    CommaScope cs(*this, false);
    ExprPtr inner = parse_relation();
    skip();
    if (!cmd_is("right")) fail("unterminated group", cur_offset());
    advance();
    skip();
    bool closed = false;
    switch (kind) {
    case BracketKind::Paren: closed = op_is(")"); break;
    case BracketKind::Bracket: closed = op_is("]"); break;
    case BracketKind::Vert: closed = op_is("|"); break;
    case BracketKind::Brace: closed = cmd_is("}"); break;
    }
    if (!closed) fail("mismatched delimiter", cur_offset());
    advance();
    if (!inner) fail("empty group", at);
    return make_group(kind, inner);
}

ExprPtr Parser::parse_sized_delim() {
    std::string text = "\\" + cur().text;
    advance();
    skip();
    if (tok_is(TokKind::Op) &&
        (cur().text == "(" || cur().text == ")" || cur().text == "[" || cur().text == "]" ||
         cur().text == "|")) {
        text += cur().text;
        advance();
    } else if (tok_is(TokKind::Punct) && cur().text == ".") {
        text += ".";
        advance();
    } else if (tok_is(TokKind::Cmd) &&
               (cur().text == "{" || cur().text == "}" || cur().text == "|" ||
                cur().text == "langle" || cur().text == "rangle" || cur().text == "lbrace" ||
                cur().text == "rbrace" || cur().text == "lvert" || cur().text == "rvert")) {
        text += "\\" + cur().text;
        advance();
    } else {
        fail("unsupported delimiter", cur_offset());
    }
    return make_mark(MarkKind::SizedDelim, std::move(text));
}

ExprPtr Parser::parse_accented(AccentKind kind) {
    const std::size_t cmd_pos = pos_;
    advance();
    skip();
    if (tok_is(TokKind::LBrace)) {
        advance();
        skip();
        ExprPtr core;
        if (tok_is(TokKind::Letter)) {
            core = make_symbol(cur().text);
            advance();
        } else if (tok_is(TokKind::Cmd) && is_greek_command(cur().text)) {
            core = make_greek(cur().text);
            advance();
        }
        if (core) {
            ExprPtr sub = try_subscript();
            skip();
            if (tok_is(TokKind::RBrace)) {
                advance();
                if (auto* s = std::get_if<Symbol>(&core->node))
                    return make_symbol(s->name, std::move(sub), kind);
                return make_greek(std::get<Greek>(core->node).name, std::move(sub), kind);
            }
        }
    }
    // Anything fancier than an accented identifier is preserved verbatim.
    pos_ = cmd_pos;
    return parse_opaque_command();
}

ExprPtr Parser::parse_styled() {
    const std::size_t cmd_pos = pos_;
    std::string style = cur().text;
    advance();
    skip();
    if (tok_is(TokKind::LBrace)) {
        advance();
        skip();
        ExprPtr core;
        if (tok_is(TokKind::Letter)) {
            core = make_symbol(cur().text);
            advance();
        } else if (tok_is(TokKind::Cmd) && is_greek_command(cur().text)) {
            core = make_greek(cur().text);
            advance();
        }
        if (core) {
            skip();
            if (tok_is(TokKind::RBrace)) {
                advance();
                if (auto* s = std::get_if<Symbol>(&core->node))
                    return make_symbol(s->name, nullptr, std::nullopt, style);
                return make_greek(std::get<Greek>(core->node).name, nullptr, std::nullopt, style);
            }
        }
    }
    pos_ = cmd_pos;
    return parse_opaque_command();
}

ExprPtr Parser::parse_inner_environment() {
    const std::size_t at = cur().offset;
    int depth = 0;
    std::size_t close = end_;
    for (std::size_t i = pos_; i < end_; ++i) {
        if (toks_[i].kind != TokKind::Cmd) continue;
        if (toks_[i].text == "begin") ++depth;
        else if (toks_[i].text == "end" && --depth == 0) {
            close = i;
            break;
        }
    }
    if (close == end_) fail("unterminated environment", at);
    std::size_t j = close + 1;
    while (j < end_ && toks_[j].kind == TokKind::Space) ++j;
    if (j >= end_ || toks_[j].kind != TokKind::LBrace) fail("unterminated environment", at);
    int braces = 0;
    for (; j < end_; ++j) {
        if (toks_[j].kind == TokKind::LBrace) ++braces;
        else if (toks_[j].kind == TokKind::RBrace && --braces == 0) break;
    }
    if (j >= end_) fail("unterminated environment", at);
    const std::size_t stop = toks_[j].offset + toks_[j].text.size();
    pos_ = j + 1;
    return make_opaque(std::string(src_.substr(at, stop - at)));
}

// Unknown command: kept verbatim together with its adjacent {...} and [...]
// argument groups.
ExprPtr Parser::parse_opaque_command() {
    const std::size_t at = cur().offset;
    std::size_t stop = at + 1 + cur().text.size();
    advance();
    for (;;) {
        std::size_t j = pos_;
        while (j < end_ && toks_[j].kind == TokKind::Space) ++j;
        if (j < end_ && toks_[j].kind == TokKind::LBrace) {
            int depth = 0;
            std::size_t k = j;
            for (; k < end_; ++k) {
                if (toks_[k].kind == TokKind::LBrace) ++depth;
                else if (toks_[k].kind == TokKind::RBrace && --depth == 0) break;
            }
            if (k >= end_) fail("unterminated group", toks_[j].offset);
            stop = toks_[k].offset + 1;
            pos_ = k + 1;
            continue;
        }
        if (j < end_ && toks_[j].kind == TokKind::Op && toks_[j].text == "[") {
            int depth = 0;
            std::size_t k = j;
            bool closed = false;
            for (; k < end_; ++k) {
                if (toks_[k].kind == TokKind::Op && toks_[k].text == "[") ++depth;
                else if (toks_[k].kind == TokKind::Op && toks_[k].text == "]" && --depth == 0) {
                    closed = true;
                    break;
                }
            }
            if (!closed) break; // stray '[': not an argument
            stop = toks_[k].offset + 1;
            pos_ = k + 1;
            continue;
        }
        break;
    }
    return make_opaque(std::string(src_.substr(at, stop - at)));
}

} // namespace

// ============================================================================
// Entry point
// ============================================================================

ParseOutcome parse_math(std::string_view src) {
    TokenizeResult lexed = tokenize(src);
    if (lexed.illegal_at)
        return {nullptr, ParseError{"unsupported control byte", *lexed.illegal_at}};
    Parser parser(src, std::move(lexed.tokens));
    try {
        return {parser.parse_document(), std::nullopt};
    } catch (const Unparseable& u) {
        return {nullptr, ParseError{u.reason, u.offset}};
    }
}

} // namespace z2h
