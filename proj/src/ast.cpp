// ast.cpp - node builders, structural equality, walks, free-symbol analysis

#include "zero2hero/ast.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "zero2hero/emitter.hpp"

namespace z2h {

// ============================================================================
// Builders
// ============================================================================

ExprPtr make_expr(ExprNode node) { return std::make_shared<const Expr>(Expr{std::move(node)}); }

ExprPtr make_number(std::string text) { return make_expr(Number{std::move(text)}); }

ExprPtr make_symbol(std::string name, ExprPtr sub, std::optional<AccentKind> accent,
                    std::optional<std::string> style) {
    return make_expr(Symbol{std::move(name), std::move(style), std::move(sub), accent});
}

ExprPtr make_greek(std::string name, ExprPtr sub, std::optional<AccentKind> accent,
                   std::optional<std::string> style) {
    return make_expr(Greek{std::move(name), std::move(style), std::move(sub), accent});
}

ExprPtr make_constant(ConstKind kind) { return make_expr(Constant{kind}); }

ExprPtr make_neg(ExprPtr operand) { return make_expr(Neg{std::move(operand)}); }

ExprPtr make_binop(BinKind op, ExprPtr lhs, ExprPtr rhs) {
    return make_expr(BinOp{op, std::move(lhs), std::move(rhs)});
}

ExprPtr make_fraction(ExprPtr num, ExprPtr den) {
    return make_expr(Fraction{std::move(num), std::move(den)});
}

ExprPtr make_function(std::string cmd, std::vector<ExprPtr> args, ExprPtr power) {
    return make_expr(Function{std::move(cmd), nullptr, std::move(power), std::move(args)});
}

ExprPtr make_applied(ExprPtr head, std::vector<ExprPtr> args) {
    return make_expr(Function{"", std::move(head), nullptr, std::move(args)});
}

ExprPtr make_bigop(BigOpKind kind, ExprPtr bound_var, ExprPtr lower, ExprPtr upper, ExprPtr body,
                   ExprPtr differential) {
    return make_expr(BigOp{kind, std::move(bound_var), std::move(lower), std::move(upper),
                           std::move(body), std::move(differential)});
}

ExprPtr make_partial(int order, ExprPtr wrt, ExprPtr operand) {
    return make_expr(Partial{order, std::move(wrt), std::move(operand)});
}

ExprPtr make_group(BracketKind bracket, ExprPtr inner) {
    return make_expr(Group{bracket, std::move(inner)});
}

ExprPtr make_opaque(std::string raw) { return make_expr(Opaque{std::move(raw)}); }

ExprPtr make_mark(MarkKind kind, std::string text) {
    return make_expr(Mark{kind, std::move(text)});
}

// ============================================================================
// Structural equality
// ============================================================================

namespace {

bool eq_opt(const ExprPtr& a, const ExprPtr& b) {
    if (!a && !b) return true;
    if (!a || !b) return false;
    return equal(a, b);
}

bool eq_vec(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!eq_opt(a[i], b[i])) return false;
    return true;
}

} // namespace

bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    const ExprNode& na = a->node;
    const ExprNode& nb = b->node;
    if (auto* x = std::get_if<Number>(&na)) return x->text == std::get<Number>(nb).text;
    if (auto* x = std::get_if<Symbol>(&na)) {
        const auto& y = std::get<Symbol>(nb);
        return x->name == y.name && x->style == y.style && x->accent == y.accent &&
               eq_opt(x->sub, y.sub);
    }
    if (auto* x = std::get_if<Greek>(&na)) {
        const auto& y = std::get<Greek>(nb);
        return x->name == y.name && x->style == y.style && x->accent == y.accent &&
               eq_opt(x->sub, y.sub);
    }
    if (auto* x = std::get_if<Constant>(&na)) return x->kind == std::get<Constant>(nb).kind;
    if (auto* x = std::get_if<Neg>(&na)) return equal(x->operand, std::get<Neg>(nb).operand);
    if (auto* x = std::get_if<BinOp>(&na)) {
        const auto& y = std::get<BinOp>(nb);
        return x->op == y.op && equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
    }
    if (auto* x = std::get_if<Fraction>(&na)) {
        const auto& y = std::get<Fraction>(nb);
        return equal(x->num, y.num) && equal(x->den, y.den);
    }
    if (auto* x = std::get_if<Function>(&na)) {
        const auto& y = std::get<Function>(nb);
        return x->cmd == y.cmd && eq_opt(x->head, y.head) && eq_opt(x->power, y.power) &&
               eq_vec(x->args, y.args);
    }
    if (auto* x = std::get_if<BigOp>(&na)) {
        const auto& y = std::get<BigOp>(nb);
        return x->kind == y.kind && eq_opt(x->bound_var, y.bound_var) && eq_opt(x->lower, y.lower) &&
               eq_opt(x->upper, y.upper) && eq_opt(x->body, y.body) &&
               eq_opt(x->differential, y.differential);
    }
    if (auto* x = std::get_if<Partial>(&na)) {
        const auto& y = std::get<Partial>(nb);
        return x->order == y.order && equal(x->wrt, y.wrt) && equal(x->operand, y.operand);
    }
    if (auto* x = std::get_if<Group>(&na)) {
        const auto& y = std::get<Group>(nb);
        return x->bracket == y.bracket && equal(x->inner, y.inner);
    }
    if (auto* x = std::get_if<Opaque>(&na)) return x->raw == std::get<Opaque>(nb).raw;
    if (auto* x = std::get_if<Mark>(&na)) {
        const auto& y = std::get<Mark>(nb);
        return x->kind == y.kind && x->text == y.text;
    }
    if (auto* x = std::get_if<Relation>(&na)) {
        const auto& y = std::get<Relation>(nb);
        return x->ops == y.ops && eq_vec(x->operands, y.operands);
    }
    if (auto* x = std::get_if<Rows>(&na)) {
        const auto& y = std::get<Rows>(nb);
        if (x->env != y.env || x->rows.size() != y.rows.size()) return false;
        for (std::size_t i = 0; i < x->rows.size(); ++i)
            if (!eq_vec(x->rows[i].chunks, y.rows[i].chunks)) return false;
        return true;
    }
    return false;
}

bool is_atom(const ExprPtr& e) {
    if (!e) return false;
    return std::holds_alternative<Number>(e->node) || std::holds_alternative<Symbol>(e->node) ||
           std::holds_alternative<Greek>(e->node) || std::holds_alternative<Constant>(e->node) ||
           std::holds_alternative<Opaque>(e->node) || std::holds_alternative<Mark>(e->node);
}

// ============================================================================
// Walks
// ============================================================================

void walk(const ExprPtr& e, const std::function<void(const ExprPtr&)>& fn) {
    if (!e) return;
    fn(e);
    auto rec = [&fn](const ExprPtr& c) { walk(c, fn); };
    if (auto* x = std::get_if<Symbol>(&e->node)) {
        rec(x->sub);
    } else if (auto* x = std::get_if<Greek>(&e->node)) {
        rec(x->sub);
    } else if (auto* x = std::get_if<Neg>(&e->node)) {
        rec(x->operand);
    } else if (auto* x = std::get_if<BinOp>(&e->node)) {
        rec(x->lhs);
        rec(x->rhs);
    } else if (auto* x = std::get_if<Fraction>(&e->node)) {
        rec(x->num);
        rec(x->den);
    } else if (auto* x = std::get_if<Function>(&e->node)) {
        rec(x->head);
        rec(x->power);
        for (const auto& a : x->args) rec(a);
    } else if (auto* x = std::get_if<BigOp>(&e->node)) {
        rec(x->bound_var);
        rec(x->lower);
        rec(x->upper);
        rec(x->body);
        rec(x->differential);
    } else if (auto* x = std::get_if<Partial>(&e->node)) {
        rec(x->wrt);
        rec(x->operand);
    } else if (auto* x = std::get_if<Group>(&e->node)) {
        rec(x->inner);
    } else if (auto* x = std::get_if<Relation>(&e->node)) {
        for (const auto& o : x->operands) rec(o);
    } else if (auto* x = std::get_if<Rows>(&e->node)) {
        for (const auto& row : x->rows)
            for (const auto& c : row.chunks) rec(c);
    }
}

// ============================================================================
// Greek command table
// ============================================================================

namespace {

// \pi is deliberately absent: it parses to Constant(Pi) so the evaluator can
// bind it, and the metric counts it as a constant rather than an identifier.
constexpr std::array<std::string_view, 39> kGreekNames = {
    "alpha",  "beta",   "gamma",   "delta", "epsilon", "varepsilon", "zeta",     "eta",
    "theta",  "vartheta", "iota",  "kappa", "lambda",  "mu",         "nu",       "xi",
    "varpi",  "rho",    "varrho",  "sigma", "varsigma", "tau",       "upsilon",  "phi",
    "varphi", "chi",    "psi",     "omega", "Gamma",   "Delta",      "Theta",    "Lambda",
    "Xi",     "Pi",     "Sigma",   "Upsilon", "Phi",   "Psi",        "Omega",
};

} // namespace

bool is_greek_command(std::string_view name) {
    return std::find(kGreekNames.begin(), kGreekNames.end(), name) != kGreekNames.end();
}

const std::vector<std::string_view>& greek_command_names() {
    static const std::vector<std::string_view> names(kGreekNames.begin(), kGreekNames.end());
    return names;
}

// ============================================================================
// Free symbols
// ============================================================================

namespace {

// Command-like identifiers inside opaque bytes, reported with a leading
// backslash so they compare against atom keys ("\\kappa" vs Greek kappa).
void opaque_names(const std::string& raw, std::set<std::string>& out) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '\\') continue;
        std::size_t j = i + 1;
        while (j < raw.size() && std::isalpha(static_cast<unsigned char>(raw[j]))) ++j;
        if (j > i + 1) out.insert(raw.substr(i, j - i));
        i = j - 1;
    }
}

bool is_identifier(const ExprPtr& e) {
    return e && (std::holds_alternative<Symbol>(e->node) || std::holds_alternative<Greek>(e->node));
}

// Scope-aware collector.  `bound` carries the atom keys bound by enclosing
// big operators (sum/product bound variables, integral differentials).
// Scripts are not descended into: a scripted identifier is one atom and its
// script belongs to the name, not to the expression's variables.
void collect_free(const ExprPtr& e, std::vector<std::string>& bound, std::set<std::string>& out) {
    if (!e) return;
    if (is_identifier(e)) {
        std::string key = atom_key(e);
        if (std::find(bound.begin(), bound.end(), key) == bound.end()) out.insert(key);
        return;
    }
    if (auto* x = std::get_if<Opaque>(&e->node)) {
        opaque_names(x->raw, out);
        return;
    }
    if (auto* x = std::get_if<BigOp>(&e->node)) {
        collect_free(x->lower, bound, out);
        collect_free(x->upper, bound, out);
        std::size_t pushed = 0;
        if (x->bound_var && is_identifier(x->bound_var)) {
            bound.push_back(atom_key(x->bound_var));
            ++pushed;
        }
        if (x->differential && is_identifier(x->differential)) {
            bound.push_back(atom_key(x->differential));
            ++pushed;
        }
        collect_free(x->body, bound, out);
        while (pushed--) bound.pop_back();
        return;
    }
    if (auto* x = std::get_if<Function>(&e->node)) {
        collect_free(x->head, bound, out);
        collect_free(x->power, bound, out);
        for (const auto& a : x->args) collect_free(a, bound, out);
        return;
    }
    if (auto* x = std::get_if<Partial>(&e->node)) {
        // The derivative variable is an ordinary occurrence; binding happens
        // at the enclosing integral (if any), not here.
        collect_free(x->wrt, bound, out);
        collect_free(x->operand, bound, out);
        return;
    }
    if (auto* x = std::get_if<Neg>(&e->node)) return collect_free(x->operand, bound, out);
    if (auto* x = std::get_if<BinOp>(&e->node)) {
        collect_free(x->lhs, bound, out);
        collect_free(x->rhs, bound, out);
        return;
    }
    if (auto* x = std::get_if<Fraction>(&e->node)) {
        collect_free(x->num, bound, out);
        collect_free(x->den, bound, out);
        return;
    }
    if (auto* x = std::get_if<Group>(&e->node)) return collect_free(x->inner, bound, out);
    if (auto* x = std::get_if<Relation>(&e->node)) {
        for (const auto& o : x->operands) collect_free(o, bound, out);
        return;
    }
    if (auto* x = std::get_if<Rows>(&e->node)) {
        for (const auto& row : x->rows)
            for (const auto& c : row.chunks) collect_free(c, bound, out);
        return;
    }
}

} // namespace

std::vector<std::string> free_symbols(const ExprPtr& e) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    collect_free(e, bound, out);
    return {out.begin(), out.end()};
}

std::vector<std::string> all_names(const ExprPtr& e) {
    std::set<std::string> out;
    walk(e, [&out](const ExprPtr& n) {
        if (is_identifier(n)) {
            out.insert(atom_key(n));
            out.insert(atom_head_key(n));
        } else if (auto* x = std::get_if<Opaque>(&n->node)) {
            opaque_names(x->raw, out);
        }
    });
    return {out.begin(), out.end()};
}

} // namespace z2h
