// emitter.cpp - LaTeX rendering, atom keys, and canonical form
//
// emit() and canonical() share one wrap predicate: wherever emit() is forced
// to print \left( ... \right) because a child binds looser than its context,
// canonical() inserts the corresponding Group node.  That shared predicate is
// what makes the round-trip law hold: parse(emit(e)) == canonical(e), and
// canonical(e) == e for anything the parser or a rewrite pass built.
//
// The `tail` flag tracks whether more factors follow in the current
// juxtaposition chain.  Big operators swallow everything to the end of their
// term when re-parsed, so a \sum may stay bare only when nothing follows it
// (tail) — otherwise it gets parenthesized.  Integral bodies always emit with
// tail=false because the differential trails them.

#include "zero2hero/emitter.hpp"

#include <cassert>

namespace z2h {

namespace {

enum class Ctx {
    Top,            // braced/group/row position: anything goes
    RelOperand,     // operand of a relation chain
    AddLhs,         // left operand of + or -
    AddRhs,         // right operand of + or -
    MulInner,       // mul-level operand with more factors following
    MulLast,        // final mul-level operand
    DivRhs,         // denominator of /
    PowBase,        // base of ^
    NegOperand,     // under unary minus
    BigOpBody,      // body of \sum or \prod
    PartialOperand, // operand of a partial derivative
};

bool is_mul_level(const ExprPtr& e) {
    if (auto* b = std::get_if<BinOp>(&e->node))
        return b->op == BinKind::Mul || b->op == BinKind::ImplicitMul || b->op == BinKind::Div;
    return false;
}

bool is_additive(const ExprPtr& e) {
    if (auto* b = std::get_if<BinOp>(&e->node))
        return b->op == BinKind::Add || b->op == BinKind::Sub;
    return false;
}

bool is_pow(const ExprPtr& e) {
    auto* b = std::get_if<BinOp>(&e->node);
    return b && b->op == BinKind::Pow;
}

bool loose(const ExprPtr& e) {
    return std::holds_alternative<Relation>(e->node) || std::holds_alternative<Rows>(e->node);
}

// A node that re-parses as exactly one factor regardless of what follows it.
bool single_factor(const ExprPtr& e, bool tail) {
    if (is_atom(e) || std::holds_alternative<Group>(e->node) ||
        std::holds_alternative<Fraction>(e->node) || std::holds_alternative<Function>(e->node) ||
        is_pow(e))
        return true;
    if (std::holds_alternative<BigOp>(e->node)) return tail; // greedy body
    if (auto* p = std::get_if<Partial>(&e->node)) return single_factor(p->operand, tail);
    return false;
}

bool needs_wrap(const ExprPtr& e, Ctx ctx, bool tail) {
    switch (ctx) {
    case Ctx::Top:
        return false;
    case Ctx::RelOperand:
        return loose(e);
    case Ctx::AddLhs:
        return loose(e);
    case Ctx::AddRhs:
        return loose(e) || is_additive(e) || std::holds_alternative<Neg>(e->node);
    case Ctx::MulInner:
        // More factors follow: anything looser than mul wraps, and a big
        // operator wraps because its body would swallow the rest.
        return loose(e) || is_additive(e) || std::holds_alternative<Neg>(e->node) ||
               std::holds_alternative<BigOp>(e->node) ||
               (std::holds_alternative<Partial>(e->node) && !single_factor(e, false));
    case Ctx::MulLast:
        return loose(e) || is_additive(e) || std::holds_alternative<Neg>(e->node) ||
               is_mul_level(e) || (std::holds_alternative<BigOp>(e->node) && !tail) ||
               (std::holds_alternative<Partial>(e->node) && !single_factor(e, tail));
    case Ctx::DivRhs:
        return loose(e) || is_additive(e) || std::holds_alternative<Neg>(e->node) ||
               is_mul_level(e) || (std::holds_alternative<BigOp>(e->node) && !tail) ||
               (std::holds_alternative<Partial>(e->node) && !single_factor(e, tail));
    case Ctx::PowBase:
        return !(std::holds_alternative<Number>(e->node) || std::holds_alternative<Symbol>(e->node) ||
                 std::holds_alternative<Greek>(e->node) ||
                 std::holds_alternative<Constant>(e->node) ||
                 std::holds_alternative<Opaque>(e->node) || std::holds_alternative<Mark>(e->node) ||
                 std::holds_alternative<Group>(e->node) ||
                 std::holds_alternative<Fraction>(e->node));
    case Ctx::NegOperand:
        return loose(e) || is_additive(e) || std::holds_alternative<Neg>(e->node) ||
               (std::holds_alternative<BigOp>(e->node) && !tail);
    case Ctx::BigOpBody:
        // Mul chains stay bare (the body is the whole term, and with !tail
        // the chain's last factor wraps itself via MulLast); additive and
        // looser wrap, as does a nested big operator that trailing factors
        // (an integral's differential) would otherwise feed into.
        return loose(e) || is_additive(e) || std::holds_alternative<Neg>(e->node) ||
               (std::holds_alternative<BigOp>(e->node) && !tail);
    case Ctx::PartialOperand:
        return !single_factor(e, tail);
    }
    return false;
}

std::string_view accent_cmd(AccentKind a) {
    switch (a) {
    case AccentKind::Hat: return "\\hat";
    case AccentKind::Bar: return "\\bar";
    case AccentKind::Tilde: return "\\tilde";
    }
    return "";
}

std::string_view rel_text(RelKind r) {
    switch (r) {
    case RelKind::Eq: return "=";
    case RelKind::Lt: return "<";
    case RelKind::Gt: return ">";
    case RelKind::Le: return "\\le";
    case RelKind::Ge: return "\\ge";
    case RelKind::Ne: return "\\ne";
    case RelKind::Approx: return "\\approx";
    case RelKind::Equiv: return "\\equiv";
    case RelKind::Sim: return "\\sim";
    case RelKind::Propto: return "\\propto";
    }
    return "=";
}

std::string_view bigop_cmd(BigOpKind k) {
    switch (k) {
    case BigOpKind::Sum: return "\\sum";
    case BigOpKind::Prod: return "\\prod";
    case BigOpKind::Integral: return "\\int";
    case BigOpKind::ContourIntegral: return "\\oint";
    }
    return "\\sum";
}

std::string emit_ctx(const ExprPtr& e, Ctx ctx, bool tail);

std::string emit_top(const ExprPtr& e) { return emit_ctx(e, Ctx::Top, true); }

// Identifier core: style-wrapped or command-prefixed name, no script/accent.
template <typename Ident>
std::string ident_core(const Ident& id, bool greek) {
    std::string base = greek ? "\\" + id.name : id.name;
    if (id.style) return "\\" + *id.style + "{" + base + "}";
    return base;
}

template <typename Ident>
std::string ident_full(const Ident& id, bool greek) {
    std::string core = ident_core(id, greek);
    if (id.sub) core += "_{" + emit_top(id.sub) + "}";
    if (id.accent) return std::string(accent_cmd(*id.accent)) + "{" + core + "}";
    return core;
}

// True when a single function argument may be printed bare (\sin x).
bool bare_arg_ok(const ExprPtr& arg) {
    return std::holds_alternative<Number>(arg->node) || std::holds_alternative<Symbol>(arg->node) ||
           std::holds_alternative<Greek>(arg->node) ||
           std::holds_alternative<Constant>(arg->node) ||
           std::holds_alternative<Fraction>(arg->node);
}

std::string emit_args_parenthesized(const std::vector<ExprPtr>& args) {
    std::string out = "\\left( ";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += emit_top(args[i]);
    }
    out += " \\right)";
    return out;
}

std::string emit_node(const ExprPtr& e, bool tail) {
    if (auto* x = std::get_if<Number>(&e->node)) return x->text;
    if (auto* x = std::get_if<Symbol>(&e->node)) return ident_full(*x, false);
    if (auto* x = std::get_if<Greek>(&e->node)) return ident_full(*x, true);
    if (auto* x = std::get_if<Constant>(&e->node)) {
        switch (x->kind) {
        case ConstKind::Pi: return "\\pi";
        case ConstKind::EulerE: return "e";
        case ConstKind::HBar: return "\\hbar";
        case ConstKind::PlanckH: return "h";
        }
    }
    if (auto* x = std::get_if<Neg>(&e->node))
        return "-" + emit_ctx(x->operand, Ctx::NegOperand, tail);
    if (auto* x = std::get_if<BinOp>(&e->node)) {
        switch (x->op) {
        case BinKind::Add:
            return emit_ctx(x->lhs, Ctx::AddLhs, true) + " + " + emit_ctx(x->rhs, Ctx::AddRhs, tail);
        case BinKind::Sub:
            return emit_ctx(x->lhs, Ctx::AddLhs, true) + " - " + emit_ctx(x->rhs, Ctx::AddRhs, tail);
        case BinKind::Mul:
            return emit_ctx(x->lhs, Ctx::MulInner, false) + " \\cdot " +
                   emit_ctx(x->rhs, Ctx::MulLast, tail);
        case BinKind::ImplicitMul:
            return emit_ctx(x->lhs, Ctx::MulInner, false) + " " +
                   emit_ctx(x->rhs, Ctx::MulLast, tail);
        case BinKind::Div:
            return emit_ctx(x->lhs, Ctx::MulInner, false) + " / " +
                   emit_ctx(x->rhs, Ctx::DivRhs, tail);
        case BinKind::Pow:
            return emit_ctx(x->lhs, Ctx::PowBase, true) + "^{" + emit_top(x->rhs) + "}";
        }
    }
    if (auto* x = std::get_if<Fraction>(&e->node))
        return "\\frac{" + emit_top(x->num) + "}{" + emit_top(x->den) + "}";
    if (auto* x = std::get_if<Function>(&e->node)) {
        if (x->cmd == "exp") return "e^{" + emit_top(x->args.at(0)) + "}";
        std::string head;
        if (!x->cmd.empty()) {
            head = "\\" + x->cmd;
            if (x->power) head += "^{" + emit_top(x->power) + "}";
        } else {
            head = emit_top(x->head);
        }
        if (!x->cmd.empty() && x->args.size() == 1 && bare_arg_ok(x->args[0]))
            return head + " " + emit_top(x->args[0]);
        return head + emit_args_parenthesized(x->args);
    }
    if (auto* x = std::get_if<BigOp>(&e->node)) {
        std::string out(bigop_cmd(x->kind));
        if (x->bound_var)
            out += "_{" + emit_top(x->bound_var) + "=" + emit_top(x->lower) + "}";
        else if (x->lower)
            out += "_{" + emit_top(x->lower) + "}";
        if (x->upper) out += "^{" + emit_top(x->upper) + "}";
        bool integral = x->kind == BigOpKind::Integral || x->kind == BigOpKind::ContourIntegral;
        out += " " + emit_ctx(x->body, Ctx::BigOpBody, integral ? false : tail);
        if (integral && x->differential) out += " \\, d" + emit_top(x->differential);
        return out;
    }
    if (auto* x = std::get_if<Partial>(&e->node)) {
        std::string ord = x->order > 1 ? "^{" + std::to_string(x->order) + "}" : "";
        return "\\frac{\\partial" + ord + "}{\\partial " + emit_top(x->wrt) + ord + "} " +
               emit_ctx(x->operand, Ctx::PartialOperand, tail);
    }
    if (auto* x = std::get_if<Group>(&e->node)) {
        switch (x->bracket) {
        case BracketKind::Paren: return "\\left( " + emit_top(x->inner) + " \\right)";
        case BracketKind::Bracket: return "\\left[ " + emit_top(x->inner) + " \\right]";
        case BracketKind::Brace: return "\\left\\{ " + emit_top(x->inner) + " \\right\\}";
        case BracketKind::Vert: return "\\left| " + emit_top(x->inner) + " \\right|";
        }
    }
    if (auto* x = std::get_if<Opaque>(&e->node)) return x->raw;
    if (auto* x = std::get_if<Mark>(&e->node)) return x->text;
    if (auto* x = std::get_if<Relation>(&e->node)) {
        // A null operand is an elided side, as in the "= rhs" rows of an
        // aligned derivation; nothing is printed for it.
        std::string out;
        if (x->operands.at(0)) out = emit_ctx(x->operands.at(0), Ctx::RelOperand, true);
        for (std::size_t i = 0; i < x->ops.size(); ++i) {
            if (!out.empty()) out += " ";
            out += rel_text(x->ops[i]);
            if (const auto& rhs = x->operands.at(i + 1))
                out += " " + emit_ctx(rhs, Ctx::RelOperand, true);
        }
        return out;
    }
    if (auto* x = std::get_if<Rows>(&e->node)) {
        std::string body;
        for (std::size_t r = 0; r < x->rows.size(); ++r) {
            if (r) body += " \\\\\n";
            const auto& chunks = x->rows[r].chunks;
            for (std::size_t c = 0; c < chunks.size(); ++c) {
                if (c) body += " & ";
                if (chunks[c]) body += emit_top(chunks[c]);
            }
        }
        if (x->env) return "\\begin{" + *x->env + "}\n" + body + "\n\\end{" + *x->env + "}";
        return body;
    }
    return "";
}

std::string emit_ctx(const ExprPtr& e, Ctx ctx, bool tail) {
    assert(e && "emit on null expression");
    if (needs_wrap(e, ctx, tail)) return "\\left( " + emit_node(e, true) + " \\right)";
    return emit_node(e, tail);
}

// ----------------------------------------------------------------------------
// canonical(): same traversal, building the tree emit() implies.
// ----------------------------------------------------------------------------

ExprPtr canon_ctx(const ExprPtr& e, Ctx ctx, bool tail);

ExprPtr canon_top(const ExprPtr& e) { return e ? canon_ctx(e, Ctx::Top, true) : nullptr; }

ExprPtr canon_children(const ExprPtr& e, bool tail) {
    if (auto* x = std::get_if<Symbol>(&e->node))
        return make_symbol(x->name, canon_top(x->sub), x->accent, x->style);
    if (auto* x = std::get_if<Greek>(&e->node))
        return make_greek(x->name, canon_top(x->sub), x->accent, x->style);
    if (auto* x = std::get_if<Neg>(&e->node))
        return make_neg(canon_ctx(x->operand, Ctx::NegOperand, tail));
    if (auto* x = std::get_if<BinOp>(&e->node)) {
        switch (x->op) {
        case BinKind::Add:
        case BinKind::Sub:
            return make_binop(x->op, canon_ctx(x->lhs, Ctx::AddLhs, true),
                              canon_ctx(x->rhs, Ctx::AddRhs, tail));
        case BinKind::Mul:
        case BinKind::ImplicitMul:
            return make_binop(x->op, canon_ctx(x->lhs, Ctx::MulInner, false),
                              canon_ctx(x->rhs, Ctx::MulLast, tail));
        case BinKind::Div:
            return make_binop(x->op, canon_ctx(x->lhs, Ctx::MulInner, false),
                              canon_ctx(x->rhs, Ctx::DivRhs, tail));
        case BinKind::Pow: {
            // e^{x} re-parses as the exp function; normalize to that node.
            if (std::holds_alternative<Constant>(x->lhs->node) &&
                std::get<Constant>(x->lhs->node).kind == ConstKind::EulerE)
                return make_function("exp", {canon_top(x->rhs)});
            return make_binop(BinKind::Pow, canon_ctx(x->lhs, Ctx::PowBase, true),
                              canon_top(x->rhs));
        }
        }
    }
    if (auto* x = std::get_if<Fraction>(&e->node))
        return make_fraction(canon_top(x->num), canon_top(x->den));
    if (auto* x = std::get_if<Function>(&e->node)) {
        std::vector<ExprPtr> args;
        args.reserve(x->args.size());
        for (const auto& a : x->args) args.push_back(canon_top(a));
        return make_expr(Function{x->cmd, canon_top(x->head), canon_top(x->power), std::move(args)});
    }
    if (auto* x = std::get_if<BigOp>(&e->node)) {
        bool integral = x->kind == BigOpKind::Integral || x->kind == BigOpKind::ContourIntegral;
        return make_bigop(x->kind, canon_top(x->bound_var), canon_top(x->lower),
                          canon_top(x->upper),
                          canon_ctx(x->body, Ctx::BigOpBody, integral ? false : tail),
                          canon_top(x->differential));
    }
    if (auto* x = std::get_if<Partial>(&e->node))
        return make_partial(x->order, canon_top(x->wrt),
                            canon_ctx(x->operand, Ctx::PartialOperand, tail));
    if (auto* x = std::get_if<Group>(&e->node))
        return make_group(x->bracket, canon_top(x->inner));
    if (auto* x = std::get_if<Relation>(&e->node)) {
        std::vector<ExprPtr> ops;
        ops.reserve(x->operands.size());
        for (const auto& o : x->operands)
            ops.push_back(o ? canon_ctx(o, Ctx::RelOperand, true) : nullptr);
        return make_expr(Relation{std::move(ops), x->ops});
    }
    if (auto* x = std::get_if<Rows>(&e->node)) {
        Rows out{x->env, {}};
        for (const auto& row : x->rows) {
            Row r;
            for (const auto& c : row.chunks) r.chunks.push_back(canon_top(c));
            out.rows.push_back(std::move(r));
        }
        return make_expr(std::move(out));
    }
    return e; // leaves
}

ExprPtr canon_ctx(const ExprPtr& e, Ctx ctx, bool tail) {
    // Normalize the node first so wrap decisions see the final shape.
    ExprPtr n = e;
    if (auto* x = std::get_if<BinOp>(&e->node)) {
        if (x->op == BinKind::Pow && std::holds_alternative<Constant>(x->lhs->node) &&
            std::get<Constant>(x->lhs->node).kind == ConstKind::EulerE)
            n = make_function("exp", {x->rhs});
    }
    if (needs_wrap(n, ctx, tail))
        return make_group(BracketKind::Paren, canon_children(n, true));
    return canon_children(n, tail);
}

} // namespace

std::string emit(const ExprPtr& e) { return emit_ctx(e, Ctx::Top, true); }

bool parses_as_single_factor(const ExprPtr& e, bool tail) { return single_factor(e, tail); }

std::string atom_key(const ExprPtr& e) {
    if (!e) return "";
    if (auto* x = std::get_if<Symbol>(&e->node)) return ident_full(*x, false);
    if (auto* x = std::get_if<Greek>(&e->node)) return ident_full(*x, true);
    return emit(e);
}

std::string atom_head_key(const ExprPtr& e) {
    if (!e) return "";
    if (auto* x = std::get_if<Symbol>(&e->node)) return ident_core(*x, false);
    if (auto* x = std::get_if<Greek>(&e->node)) return ident_core(*x, true);
    return emit(e);
}

ExprPtr canonical(const ExprPtr& e) { return e ? canon_ctx(e, Ctx::Top, true) : nullptr; }

} // namespace z2h
