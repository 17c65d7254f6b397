// test_parser.cpp - Math grammar unit tests
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>
#include <vector>

#include "gen.hpp"
#include "zero2hero/ast.hpp"
#include "zero2hero/emitter.hpp"
#include "zero2hero/parser.hpp"
#include "zero2hero/rng.hpp"

using namespace z2h;

namespace {

ExprPtr parsed(const std::string& src) {
    ParseOutcome r = parse_math(src);
    REQUIRE_MESSAGE(r.ok(), "parse failed for: " << src << " ("
                                << (r.error ? r.error->reason : "") << ")");
    return r.expr;
}

// Returned by value: the argument is often a temporary, and a copy (cheap,
// children are shared pointers) outlives it under const-ref binding.
template <typename T>
T as(const ExprPtr& e) {
    REQUIRE(e != nullptr);
    const T* n = std::get_if<T>(&e->node);
    REQUIRE(n != nullptr);
    return *n;
}

// The worked loss expression exercised throughout: a split alignment with a
// contour integral, nested sums, uninterpreted applied functions and
// second-order derivatives.
const char kLossInner[] =
    "\\begin{split}\n"
    "    \\mathcal{L}=\\sum_{i=1}^{n}\\Bigg[&-y_i\\oint_{\\Omega}\\Bigg(\\zeta\\left("
    "\\frac{\\hat{y_i}}{1 - \\hat{y_i}} \\right) \\frac{\\partial}{\\partial \\theta_i} "
    "\\left( f_i(\\theta) \\log \\frac{\\hat{y_i}}{1 - \\hat{y_i}}\\right) \\Bigg) d\\theta \\\\\n"
    "&+ \\frac{1}{2} \\sum_{k=1}^{n} \\frac{\\partial^2}{\\partial x_k^2} \\left( "
    "\\sum_{i=1}^{n} y_i \\hat{y_i} \\frac{\\partial \\log f_i(\\theta)}{\\partial x_k} "
    "\\right)\\Bigg],\n"
    "\\end{split}";

} // namespace

// ============================================================================
// Core constructs
// ============================================================================

TEST_CASE("a reduction parses into bound variable, bounds and body") {
    ExprPtr e = parsed("\\sum_{k=1}^{1} x");
    const BigOp& op = as<BigOp>(e);
    CHECK(op.kind == BigOpKind::Sum);
    CHECK(as<Symbol>(op.bound_var).name == "k");
    CHECK(as<Number>(op.lower).text == "1");
    CHECK(as<Number>(op.upper).text == "1");
    CHECK(as<Symbol>(op.body).name == "x");
}

TEST_CASE("an integral keeps bounds, body and differential") {
    ExprPtr e = parsed("\\int_{0}^{1} E \\, d\\tau");
    const BigOp& op = as<BigOp>(e);
    CHECK(op.kind == BigOpKind::Integral);
    CHECK(op.bound_var == nullptr);
    CHECK(as<Number>(op.lower).text == "0");
    CHECK(as<Number>(op.upper).text == "1");
    CHECK(as<Symbol>(op.body).name == "E");
    CHECK(as<Greek>(op.differential).name == "tau");
    CHECK(emit(e) == "\\int_{0}^{1} E \\, d\\tau");
}

TEST_CASE("a contour integral with only a lower bound") {
    ExprPtr e = parsed("\\oint_{\\Omega} g \\, d\\theta");
    const BigOp& op = as<BigOp>(e);
    CHECK(op.kind == BigOpKind::ContourIntegral);
    CHECK(as<Greek>(op.lower).name == "Omega");
    CHECK(op.upper == nullptr);
}

TEST_CASE("precedence: juxtaposition binds tighter than addition") {
    ExprPtr e = parsed("a + b c^{2}");
    const BinOp& add = as<BinOp>(e);
    CHECK(add.op == BinKind::Add);
    const BinOp& mul = as<BinOp>(add.rhs);
    CHECK(mul.op == BinKind::ImplicitMul);
    const BinOp& pow = as<BinOp>(mul.rhs);
    CHECK(pow.op == BinKind::Pow);
}

TEST_CASE("precedence: slash division binds a single factor pair") {
    ExprPtr e = parsed("a - b / c");
    const BinOp& sub = as<BinOp>(e);
    CHECK(sub.op == BinKind::Sub);
    CHECK(as<BinOp>(sub.rhs).op == BinKind::Div);
}

TEST_CASE("subscripted and accented identifiers are single atoms") {
    CHECK(atom_key(parsed("x_{i}")) == "x_{i}");
    CHECK(atom_key(parsed("x_i")) == "x_{i}");
    const Symbol& s = as<Symbol>(parsed("\\hat{y_i}"));
    CHECK(s.name == "y");
    CHECK(s.accent == AccentKind::Hat);
    CHECK(atom_key(parsed("\\hat{y_i}")) == "\\hat{y_{i}}");
    const Symbol& styled = as<Symbol>(parsed("\\mathcal{L}"));
    CHECK(styled.style == "mathcal");
}

TEST_CASE("bare e and h read as constants until subscripted") {
    CHECK(as<Constant>(parsed("e")).kind == ConstKind::EulerE);
    CHECK(as<Constant>(parsed("h")).kind == ConstKind::PlanckH);
    CHECK(as<Constant>(parsed("\\hbar")).kind == ConstKind::HBar);
    CHECK(as<Constant>(parsed("\\pi")).kind == ConstKind::Pi);
    CHECK(as<Symbol>(parsed("e_1")).name == "e");
    const Function& f = as<Function>(parsed("e^{x}"));
    CHECK(f.cmd == "exp");
}

TEST_CASE("unknown commands become opaque atoms with their arguments") {
    const Opaque& o = as<Opaque>(parsed("\\star"));
    CHECK(o.raw == "\\star");
    CHECK(as<Opaque>(parsed("\\widetilde{Q}")).raw == "\\widetilde{Q}");
    ExprPtr e = parsed("x + \\operatorname{tr} y");
    int opaques = 0;
    walk(e, [&](const ExprPtr& n) {
        if (std::holds_alternative<Opaque>(n->node)) ++opaques;
    });
    CHECK(opaques == 1);
}

TEST_CASE("an identifier before parentheses is an application") {
    const Function& f = as<Function>(parsed("f(x)"));
    REQUIRE(f.head != nullptr);
    CHECK(as<Symbol>(f.head).name == "f");
    REQUIRE(f.args.size() == 1);

    const Function& fi = as<Function>(parsed("f_i(\\theta)"));
    CHECK(atom_key(fi.head) == "f_{i}");
    CHECK(as<Greek>(fi.args[0]).name == "theta");

    const Function& g = as<Function>(parsed("g(x, y)"));
    CHECK(g.args.size() == 2);
}

TEST_CASE("relations chain with their operators in order") {
    const Relation& r = as<Relation>(parsed("a = b < c"));
    REQUIRE(r.operands.size() == 3);
    REQUIRE(r.ops.size() == 2);
    CHECK(r.ops[0] == RelKind::Eq);
    CHECK(r.ops[1] == RelKind::Lt);
}

TEST_CASE("a leading relation operator leaves a null left operand") {
    const Relation& r = as<Relation>(parsed("= x + 1"));
    REQUIRE(r.operands.size() == 2);
    CHECK(r.operands[0] == nullptr);
    CHECK(r.operands[1] != nullptr);
}

TEST_CASE("a leading plus is preserved as a display mark") {
    ExprPtr e = parsed("+ y");
    const BinOp& m = as<BinOp>(e);
    CHECK(m.op == BinKind::ImplicitMul);
    const Mark& mark = as<Mark>(m.lhs);
    CHECK(mark.kind == MarkKind::Punct);
    CHECK(mark.text == "+");
    CHECK(emit(e) == "+ y");
}

TEST_CASE("alignment rows split at double backslash and ampersand") {
    ExprPtr e = parsed("\\begin{split} a &= b \\\\ &= c \\end{split}");
    const Rows& rows = as<Rows>(e);
    CHECK(rows.env == "split");
    REQUIRE(rows.rows.size() == 2);
    REQUIRE(rows.rows[0].chunks.size() == 2);
    REQUIRE(rows.rows[1].chunks.size() == 2);
    CHECK(rows.rows[1].chunks[0] == nullptr);
    const Relation& cont = as<Relation>(rows.rows[1].chunks[1]);
    CHECK(cont.operands[0] == nullptr);
}

TEST_CASE("top level alignment without an environment") {
    ExprPtr e = parsed("a & b \\\\ c & d e");
    const Rows& rows = as<Rows>(e);
    CHECK(!rows.env.has_value());
    CHECK(rows.rows.size() == 2);
}

// ============================================================================
// Free symbols
// ============================================================================

TEST_CASE("bound variables stay out of the free set") {
    std::vector<std::string> f1 = free_symbols(parsed("\\sum_{k=1}^{n} k"));
    CHECK(f1 == std::vector<std::string>{"n"});

    std::vector<std::string> f2 = free_symbols(parsed("k + \\sum_{k=1}^{n} k"));
    CHECK(f2 == std::vector<std::string>{"k", "n"});

    std::vector<std::string> f3 = free_symbols(parsed("\\int_{0}^{1} c \\, d\\tau"));
    CHECK(f3 == std::vector<std::string>{"c"});
}

TEST_CASE("free symbols are sorted and deduplicated") {
    std::vector<std::string> f = free_symbols(parsed("z + a z + \\alpha"));
    CHECK(f == std::vector<std::string>{"\\alpha", "a", "z"});
}

// ============================================================================
// The worked loss expression
// ============================================================================

TEST_CASE("the loss expression parses without opaque fallbacks") {
    ExprPtr e = parsed(kLossInner);

    int opaque = 0, contour = 0, sums = 0, partials = 0;
    std::set<std::string> greeks;
    walk(e, [&](const ExprPtr& n) {
        if (std::holds_alternative<Opaque>(n->node)) ++opaque;
        if (auto* b = std::get_if<BigOp>(&n->node)) {
            if (b->kind == BigOpKind::ContourIntegral) ++contour;
            if (b->kind == BigOpKind::Sum) ++sums;
        }
        if (std::holds_alternative<Partial>(n->node)) ++partials;
        if (auto* g = std::get_if<Greek>(&n->node)) greeks.insert(g->name);
    });

    CHECK(opaque == 0);
    CHECK(contour >= 1);
    CHECK(sums >= 2);
    CHECK(partials >= 1);
    CHECK(greeks.size() >= 3);

    // The uninterpreted functions are applied heads, not opaque bytes.
    int applied = 0;
    walk(e, [&](const ExprPtr& n) {
        if (auto* f = std::get_if<Function>(&n->node))
            if (f->head) ++applied;
    });
    CHECK(applied >= 2);

    // And the whole block round trips through its canonical form.
    ParseOutcome back = parse_math(emit(e));
    REQUIRE(back.ok());
    CHECK(equal(back.expr, canonical(e)));
}

// ============================================================================
// Failure behavior
// ============================================================================

TEST_CASE("malformed input fails with a reason and offset") {
    for (const char* bad : {"\\frac{1}", "\\left( x", "x ^", "{", "\\begin{split} x",
                            "x +", "\\frac{}{2}"}) {
        ParseOutcome r = parse_math(bad);
        CHECK_MESSAGE(!r.ok(), "expected failure for: " << bad);
        if (!r.ok()) {
            CHECK(!r.error->reason.empty());
            CHECK(r.error->offset <= std::string(bad).size());
        }
    }
}

TEST_CASE("parsing never throws on arbitrary token soup") {
    Rng rng(11);
    const std::string alphabet = "ax1+-\\{}_^&% $.,()[]|<>=\n\\frac\\sum\\left\\right";
    for (int i = 0; i < 3000; ++i) {
        std::string src;
        const std::size_t len = rng.below(30);
        for (std::size_t j = 0; j < len; ++j) src += alphabet[rng.below(alphabet.size())];
        ParseOutcome r = parse_math(src);
        if (!r.ok()) CHECK(r.error->offset <= src.size());
    }
}

TEST_CASE("emission of any parsed generator tree parses back") {
    Rng rng(20250815);
    for (int i = 0; i < 300; ++i) {
        ExprPtr e = gen::expr(rng);
        ParseOutcome r = parse_math(emit(e));
        REQUIRE(r.ok());
        CHECK(equal(r.expr, canonical(e)));
    }
}
