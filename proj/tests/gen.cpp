// gen.cpp - Seeded random expressions and documents for property tests

#include "gen.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace z2h::gen {

namespace {

// ============================================================================
// Atom pools
// ============================================================================

// "e", "h" and "d" are deliberately absent: bare e and h parse as constants,
// and d next to an identifier can read as a differential inside integrals.
constexpr std::array<std::string_view, 20> kLetters = {
    "x", "y", "z", "u", "v", "w", "a", "b", "c", "g",
    "r", "s", "t", "p", "q", "n", "m", "E", "L", "Q",
};

constexpr std::array<std::string_view, 14> kGreeks = {
    "alpha", "beta",  "gamma", "delta", "theta", "lambda", "mu",
    "nu",    "sigma", "phi",   "psi",   "omega", "Omega",  "Gamma",
};

// Evaluable trees keep tau/chi/upsilon reserved for integration variables so
// integral bodies are constant in the bound variable by construction.
constexpr std::array<std::string_view, 3> kDiffGreeks = {"tau", "chi", "upsilon"};

constexpr std::array<std::string_view, 11> kNumbers = {
    "0", "1", "2", "3", "4", "5", "7", "12", "0.5", "2.5", "3.75",
};

constexpr std::array<std::string_view, 8> kOpaques = {
    "\\star",         "\\dagger",  "\\nabla",        "\\infty",
    "\\aleph",        "\\vec{p}",  "\\widetilde{Q}", "\\operatorname{tr}",
};

constexpr std::array<std::string_view, 6> kFunctions = {
    "sin", "cos", "tan", "ln", "exp", "tanh",
};

constexpr std::array<std::string_view, 4> kSafeFunctions = {
    "sin", "cos", "tanh", "sinh",
};

template <std::size_t N>
std::string pick(Rng& rng, const std::array<std::string_view, N>& pool) {
    return std::string(pool[rng.below(N)]);
}

// ============================================================================
// Parser-shaped expressions
// ============================================================================

ExprPtr script_atom(Rng& rng) {
    switch (rng.below(3)) {
        case 0: return make_number(std::to_string(rng.below(10)));
        case 1: return make_symbol(pick(rng, kLetters));
        default: return make_greek(pick(rng, kGreeks));
    }
}

ExprPtr identifier(Rng& rng) {
    ExprPtr sub = rng.below(4) == 0 ? script_atom(rng) : nullptr;
    // At most one decoration: an accent or a style, never both at once.
    std::optional<AccentKind> accent;
    std::optional<std::string> style;
    switch (rng.below(8)) {
        case 0: accent = AccentKind::Hat; break;
        case 1: accent = AccentKind::Bar; break;
        case 2: accent = AccentKind::Tilde; break;
        case 3: style = rng.below(2) ? "mathcal" : "mathbb"; break;
        default: break;
    }
    if (rng.below(3) == 0) return make_greek(pick(rng, kGreeks), std::move(sub), accent, style);
    return make_symbol(pick(rng, kLetters), std::move(sub), accent, style);
}

ExprPtr atom(Rng& rng) {
    switch (rng.below(8)) {
        case 0: return make_number(pick(rng, kNumbers));
        case 1: return make_constant(static_cast<ConstKind>(rng.below(4)));
        case 2: return make_opaque(pick(rng, kOpaques));
        default: return identifier(rng);
    }
}

// Whether e may stand directly right of a juxtaposed factor.  Only shapes
// the canonical form never parenthesizes in any surrounding context are
// allowed: anything else can end up emitted as a \left( group, which
// re-parses as an application argument list whenever the factor to its left
// ends in an identifier — a tree the parser never builds.  BigOps and
// prefix functions are excluded too: in mid-chain positions the canonical
// form must wrap them to stop them absorbing the factors that follow.
bool juxt_safe_rhs(const ExprPtr& e) {
    if (!e) return false;
    if (auto* g = std::get_if<Group>(&e->node)) return g->bracket != BracketKind::Paren;
    if (auto* b = std::get_if<BinOp>(&e->node)) {
        if (b->op != BinKind::Pow) return false;
        return std::holds_alternative<Symbol>(b->lhs->node) ||
               std::holds_alternative<Greek>(b->lhs->node) ||
               std::holds_alternative<Number>(b->lhs->node) ||
               std::holds_alternative<Constant>(b->lhs->node);
    }
    if (auto* f = std::get_if<Function>(&e->node)) return f->head != nullptr;
    return std::holds_alternative<Number>(e->node) || std::holds_alternative<Symbol>(e->node) ||
           std::holds_alternative<Greek>(e->node) || std::holds_alternative<Constant>(e->node) ||
           std::holds_alternative<Opaque>(e->node) || std::holds_alternative<Fraction>(e->node);
}

ExprPtr node(Rng& rng, int depth) {
    if (depth <= 0) return atom(rng);
    auto child = [&](int d = -1) { return node(rng, d < 0 ? depth - 1 : d); };
    switch (rng.below(16)) {
        case 0: return make_binop(BinKind::Add, child(), child());
        case 1: return make_binop(BinKind::Sub, child(), child());
        case 2: return make_binop(BinKind::Mul, child(), child());
        case 3: {
            ExprPtr l = child();
            ExprPtr r = child();
            for (int tries = 0; !juxt_safe_rhs(r) && tries < 32; ++tries) r = child();
            if (!juxt_safe_rhs(r)) r = atom(rng);
            return make_binop(BinKind::ImplicitMul, std::move(l), std::move(r));
        }
        case 4: return make_binop(BinKind::Div, child(), child());
        case 5: return make_binop(BinKind::Pow, child(), child(0));
        case 6: return make_fraction(child(), child());
        case 7: return make_neg(child());
        case 8: {
            const std::string cmd = pick(rng, kFunctions);
            ExprPtr power;
            if (cmd != "exp" && rng.below(4) == 0)
                power = make_number(rng.below(2) ? "2" : "3");
            return make_function(cmd, {child()}, std::move(power));
        }
        case 9: {
            ExprPtr head = rng.below(2) ? make_symbol("f", rng.below(2) ? script_atom(rng) : nullptr)
                                        : identifier(rng);
            std::vector<ExprPtr> args;
            args.push_back(child());
            if (rng.below(3) == 0) args.push_back(child());
            return make_applied(std::move(head), std::move(args));
        }
        case 10: {
            BigOpKind k = rng.below(2) ? BigOpKind::Sum : BigOpKind::Prod;
            ExprPtr bv = rng.below(4) == 0 ? make_greek("kappa") : make_symbol("k");
            ExprPtr upper = rng.below(2) ? make_symbol("n")
                                         : make_number(std::to_string(1 + rng.below(9)));
            return make_bigop(k, std::move(bv), make_number("1"), std::move(upper), child());
        }
        case 11: {
            BigOpKind k = rng.below(4) == 0 ? BigOpKind::ContourIntegral : BigOpKind::Integral;
            ExprPtr lower, upper;
            switch (rng.below(3)) {
                case 0: break;
                case 1: lower = make_greek("Omega"); break;
                default:
                    lower = make_number("0");
                    upper = make_number("1");
                    break;
            }
            ExprPtr diff = rng.below(2) ? make_greek("theta") : make_symbol("t");
            return make_bigop(k, nullptr, std::move(lower), std::move(upper), child(),
                              std::move(diff));
        }
        case 12: {
            ExprPtr wrt = rng.below(2) ? make_greek("theta", rng.below(2) ? script_atom(rng) : nullptr)
                                       : make_symbol("x", script_atom(rng));
            return make_partial(rng.below(3) == 0 ? 2 : 1, std::move(wrt), child());
        }
        case 13: {
            static constexpr std::array<BracketKind, 4> kBrackets = {
                BracketKind::Paren, BracketKind::Bracket, BracketKind::Brace, BracketKind::Vert};
            return make_group(kBrackets[rng.below(4)], child());
        }
        default: return atom(rng);
    }
}

constexpr std::array<RelKind, 8> kRels = {
    RelKind::Eq, RelKind::Lt, RelKind::Gt, RelKind::Le,
    RelKind::Ge, RelKind::Ne, RelKind::Approx, RelKind::Sim,
};

ExprPtr relation(Rng& rng, int depth) {
    std::vector<ExprPtr> operands;
    std::vector<RelKind> ops;
    operands.push_back(node(rng, depth));
    const std::size_t extra = 1 + rng.below(2);
    for (std::size_t i = 0; i < extra; ++i) {
        ops.push_back(kRels[rng.below(kRels.size())]);
        operands.push_back(node(rng, depth));
    }
    return make_expr(Relation{std::move(operands), std::move(ops)});
}

ExprPtr plus_continuation(Rng& rng, int depth) {
    return make_binop(BinKind::ImplicitMul, make_mark(MarkKind::Punct, "+"), node(rng, depth));
}

ExprPtr rows(Rng& rng, int depth) {
    std::optional<std::string> env;
    switch (rng.below(3)) {
        case 0: env = "split"; break;
        case 1: env = "aligned"; break;
        default: break;
    }
    const std::size_t nrows = 2 + rng.below(2);
    Rows out{env, {}};
    for (std::size_t r = 0; r < nrows; ++r) {
        Row row;
        if (r == 0) {
            row.chunks.push_back(node(rng, depth));
            if (rng.below(2)) {
                row.chunks.push_back(make_expr(
                    Relation{{nullptr, node(rng, depth)}, {RelKind::Eq}}));
            }
        } else {
            switch (rng.below(3)) {
                case 0:
                    row.chunks.push_back(nullptr);
                    row.chunks.push_back(plus_continuation(rng, depth));
                    break;
                case 1:
                    row.chunks.push_back(nullptr);
                    row.chunks.push_back(make_expr(
                        Relation{{nullptr, node(rng, depth)}, {RelKind::Eq}}));
                    break;
                default: row.chunks.push_back(node(rng, depth)); break;
            }
        }
        out.rows.push_back(std::move(row));
    }
    return make_expr(std::move(out));
}

// ============================================================================
// Oracle-safe expressions
// ============================================================================

ExprPtr safe_atom(Rng& rng, const std::vector<std::string>& bound) {
    if (!bound.empty() && rng.below(3) == 0)
        return make_symbol(bound[rng.below(bound.size())]);
    switch (rng.below(6)) {
        case 0: return make_number(pick(rng, kNumbers));
        case 1: return make_constant(static_cast<ConstKind>(rng.below(4)));
        case 2: return make_greek(pick(rng, kGreeks));
        case 3: return make_symbol(pick(rng, kLetters), script_atom(rng));
        default: return make_symbol(pick(rng, kLetters));
    }
}

// Denominators that cannot vanish: a positive literal or v^2 + 1.
ExprPtr safe_denominator(Rng& rng, int depth, std::vector<std::string>& bound) {
    if (depth <= 0 || rng.below(2) == 0)
        return make_number(std::to_string(2 + rng.below(4)));
    return make_group(BracketKind::Paren,
                      make_binop(BinKind::Add,
                                 make_binop(BinKind::Pow, safe_atom(rng, bound),
                                            make_number("2")),
                                 make_number("1")));
}

ExprPtr safe_node(Rng& rng, int depth, std::vector<std::string>& bound) {
    if (depth <= 0) return safe_atom(rng, bound);
    auto child = [&] { return safe_node(rng, depth - 1, bound); };
    switch (rng.below(12)) {
        case 0: return make_binop(BinKind::Add, child(), child());
        case 1: return make_binop(BinKind::Sub, child(), child());
        case 2: return make_binop(BinKind::Mul, child(), child());
        case 3: {
            ExprPtr l = child();
            ExprPtr r = child();
            for (int tries = 0; !juxt_safe_rhs(r) && tries < 32; ++tries) r = child();
            if (!juxt_safe_rhs(r)) r = safe_atom(rng, bound);
            return make_binop(BinKind::ImplicitMul, std::move(l), std::move(r));
        }
        case 4: return make_binop(BinKind::Div, child(), safe_denominator(rng, depth - 1, bound));
        case 5: return make_fraction(child(), safe_denominator(rng, depth - 1, bound));
        case 6: return make_neg(child());
        case 7: return make_binop(BinKind::Pow, child(), make_number(rng.below(2) ? "2" : "3"));
        case 8: return make_function(pick(rng, kSafeFunctions), {child()});
        case 9: {
            const std::string bv = rng.below(2) ? "k" : "j";
            ExprPtr upper = make_number(std::to_string(1 + rng.below(3)));
            bound.push_back(bv);
            ExprPtr body = safe_node(rng, depth - 1, bound);
            bound.pop_back();
            return make_bigop(rng.below(2) ? BigOpKind::Sum : BigOpKind::Prod,
                              make_symbol(bv), make_number("1"), std::move(upper),
                              std::move(body));
        }
        case 10: {
            // Body atoms never draw from kDiffGreeks, so the body is constant
            // in the integration variable by construction.
            ExprPtr body = child();
            return make_bigop(BigOpKind::Integral, nullptr,
                              make_number(std::to_string(rng.below(3))),
                              make_number(std::to_string(3 + rng.below(3))), std::move(body),
                              make_greek(pick(rng, kDiffGreeks)));
        }
        default: return make_group(BracketKind::Paren, child());
    }
}

// ============================================================================
// Documents
// ============================================================================

constexpr std::array<std::string_view, 12> kWords = {
    "the",   "operator", "spectrum", "decays", "rapidly", "under",
    "rescaling", "while", "boundary", "term",  "vanishes", "uniformly",
};

constexpr std::array<std::string_view, 10> kMathBits = {
    "x + y",
    "E = m c^{2}",
    "\\frac{a}{b} - 1",
    "\\alpha_{i} \\beta",
    "\\sum_{k=1}^{n} k",
    "f(x) - g(x)",
    "\\int_{0}^{1} u \\, dt",
    "\\hat{y_{i}}",
    "2 \\pi \\hbar",
    "\\left( p + q \\right)^{2}",
};

std::string prose_run(Rng& rng) {
    std::string out;
    const std::size_t words = 3 + rng.below(6);
    for (std::size_t i = 0; i < words; ++i) {
        out += pick(rng, kWords);
        out += ' ';
    }
    switch (rng.below(6)) {
        case 0: out += "costs \\$5 in 30\\% of cases "; break;
        case 1: out += "\n"; break;
        case 2: out += ".\n\n"; break;
        default: break;
    }
    return out;
}

std::string math_inner(Rng& rng) {
    std::string out(kMathBits[rng.below(kMathBits.size())]);
    if (rng.below(4) == 0) {
        out += " + ";
        out += kMathBits[rng.below(kMathBits.size())];
    }
    return out;
}

std::string block(Rng& rng) {
    switch (rng.below(12)) {
        case 0: return "% a comment with $x+1$ and \\] inside\n";
        case 1: return "\\verb|$a + b$| ";
        case 2: return "\\verb*!x $ y! ";
        case 3:
            return "\\begin{verbatim}\nraw $ \\) \\] \\end{align} bytes\n\\end{verbatim}\n";
        case 4: return "$" + math_inner(rng) + "$ ";
        case 5: return "\\(" + math_inner(rng) + "\\) ";
        case 6: return "$$" + math_inner(rng) + "$$\n";
        case 7: return "\\[ " + math_inner(rng) + " \\]\n";
        case 8: {
            std::string env = rng.below(2) ? "equation" : "align";
            std::string body = math_inner(rng);
            if (env == "align" && rng.below(2))
                body += " &= " + math_inner(rng) + " \\\\\n  &= " + math_inner(rng);
            return "\\begin{" + env + "}\n" + body + "\n\\end{" + env + "}\n";
        }
        default: return prose_run(rng);
    }
}

} // namespace

ExprPtr expr(Rng& rng, int depth) {
    switch (rng.below(12)) {
        case 0: return relation(rng, depth - 1);
        case 1: return rows(rng, depth - 1);
        case 2:
            return make_binop(BinKind::ImplicitMul, node(rng, depth),
                              make_mark(MarkKind::Punct, rng.below(2) ? "," : "."));
        default: return node(rng, depth);
    }
}

ExprPtr evaluable(Rng& rng, int depth) {
    std::vector<std::string> bound;
    return safe_node(rng, depth, bound);
}

std::string document(Rng& rng) {
    std::string out;
    const std::size_t blocks = 1 + rng.below(12);
    for (std::size_t i = 0; i < blocks; ++i) out += block(rng);
    return out;
}

} // namespace z2h::gen
