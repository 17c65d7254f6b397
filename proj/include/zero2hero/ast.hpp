// ast.hpp - expression tree for LaTeX math
//
// Nodes are immutable and shared (ExprPtr = shared_ptr<const Expr>), so
// rewrite passes can wrap or swap subtrees without copying whole equations
// and the per-equation parallel loop can share parsed originals freely.
//
// Two node families deserve a note because plain math grammars lack them:
//  - Relation chains (a = b = c).  Rewrites never wrap a relation whole;
//    they map over its operands so each side keeps its value.
//  - Marker atoms (\Bigg[ sizing glyphs, trailing punctuation).  These are
//    display-only tokens that real equations carry around; they participate
//    in layout but have no value, and the evaluator refuses to interpret
//    any expression containing them.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace z2h {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class AccentKind : std::uint8_t { Hat, Bar, Tilde };
enum class BracketKind : std::uint8_t { Paren, Bracket, Brace, Vert };
enum class BinKind : std::uint8_t { Add, Sub, Mul, ImplicitMul, Div, Pow };
enum class BigOpKind : std::uint8_t { Sum, Prod, Integral, ContourIntegral };
enum class ConstKind : std::uint8_t { Pi, EulerE, HBar, PlanckH };
enum class RelKind : std::uint8_t { Eq, Lt, Gt, Le, Ge, Ne, Approx, Equiv, Sim, Propto };
enum class MarkKind : std::uint8_t { SizedDelim, Punct };

// Exact decimal literal, kept as written ("0.50" stays "0.50").
struct Number {
    std::string text;
};

// Latin identifier.  `style` records a font wrapper command name such as
// "mathcal"; `sub` is the subscript expression; the accent wraps base+sub.
// A scripted/accented/styled identifier is one atom: y_i is not an indexing
// operation, it is the symbol named "y_{i}".
struct Symbol {
    std::string name;
    std::optional<std::string> style;
    ExprPtr sub;
    std::optional<AccentKind> accent;
};

// Greek identifier (\theta, \varphi, ...).  Same extras as Symbol.
struct Greek {
    std::string name;
    std::optional<std::string> style;
    ExprPtr sub;
    std::optional<AccentKind> accent;
};

// Known constants the evaluator binds itself: pi, Euler e, hbar, Planck h.
struct Constant {
    ConstKind kind;
};

struct Neg {
    ExprPtr operand;
};

struct BinOp {
    BinKind op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Fraction {
    ExprPtr num;
    ExprPtr den;
};

// Function application.  Command functions (\sin, \ln, ...) have `cmd` set
// and no head; applied identifiers like f_i(x) or \zeta(x) carry the
// identifier atom in `head`.  `power` is the \sin^{2} notation.  exp is a
// command function rendered as e^{...}.
struct Function {
    std::string cmd;
    ExprPtr head;
    ExprPtr power;
    std::vector<ExprPtr> args;
};

// \sum, \prod, \int, \oint.  Sums/products with bounds carry a bound_var
// (\sum_{k=1}^{n}); integrals carry the differential variable instead.
struct BigOp {
    BigOpKind kind;
    ExprPtr bound_var;
    ExprPtr lower;
    ExprPtr upper;
    ExprPtr body;
    ExprPtr differential;
};

// \frac{\partial}{\partial x} X, order >= 1.  The emitter always prints the
// operand after the fraction; the parser also accepts the operand embedded
// in the numerator (\frac{\partial X}{\partial x}).
struct Partial {
    int order = 1;
    ExprPtr wrt;
    ExprPtr operand;
};

// \left(...\right) and friends.  Plain (..), [..] and TeX brace groups in
// expression position normalize to this node; emission always uses
// \left/\right so grouping survives any surrounding rewrite.
struct Group {
    BracketKind bracket;
    ExprPtr inner;
};

// Escape hatch: an unknown command plus its brace/bracket arguments, stored
// byte-exact.  Opaque content round-trips verbatim and poisons evaluation.
struct Opaque {
    std::string raw;
};

// Display-only atom: either an unpaired sizing delimiter (\Bigg[) or loose
// punctuation inside an equation (the trailing comma of a display equation).
struct Mark {
    MarkKind kind;
    std::string text;
};

// Relation chain: operands.size() == ops.size() + 1.
struct Relation {
    std::vector<ExprPtr> operands;
    std::vector<RelKind> ops;
};

// One row of a multi-row equation, already split at top-level alignment
// tabs.  A null chunk is an empty cell (rows often start with "& ...").
struct Row {
    std::vector<ExprPtr> chunks;
};

// split/aligned content, or bare \\-separated rows of an align-style
// environment.  `env` is the inner wrapper name when one was present.
struct Rows {
    std::optional<std::string> env;
    std::vector<Row> rows;
};

using ExprNode = std::variant<Number, Symbol, Greek, Constant, Neg, BinOp, Fraction, Function,
                              BigOp, Partial, Group, Opaque, Mark, Relation, Rows>;

struct Expr {
    ExprNode node;
};

// ============================================================================
// Construction helpers
// ============================================================================

ExprPtr make_expr(ExprNode node);
ExprPtr make_number(std::string text);
ExprPtr make_symbol(std::string name, ExprPtr sub = nullptr,
                    std::optional<AccentKind> accent = std::nullopt,
                    std::optional<std::string> style = std::nullopt);
ExprPtr make_greek(std::string name, ExprPtr sub = nullptr,
                   std::optional<AccentKind> accent = std::nullopt,
                   std::optional<std::string> style = std::nullopt);
ExprPtr make_constant(ConstKind kind);
ExprPtr make_neg(ExprPtr operand);
ExprPtr make_binop(BinKind op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_fraction(ExprPtr num, ExprPtr den);
ExprPtr make_function(std::string cmd, std::vector<ExprPtr> args, ExprPtr power = nullptr);
ExprPtr make_applied(ExprPtr head, std::vector<ExprPtr> args);
ExprPtr make_bigop(BigOpKind kind, ExprPtr bound_var, ExprPtr lower, ExprPtr upper, ExprPtr body,
                   ExprPtr differential = nullptr);
ExprPtr make_partial(int order, ExprPtr wrt, ExprPtr operand);
ExprPtr make_group(BracketKind bracket, ExprPtr inner);
ExprPtr make_opaque(std::string raw);
ExprPtr make_mark(MarkKind kind, std::string text);

// ============================================================================
// Queries
// ============================================================================

// Deep structural equality (exact: "2" != "2.0", Mul != ImplicitMul).
bool equal(const ExprPtr& a, const ExprPtr& b);

// True for Symbol/Greek/Constant/Number/Mark/Opaque leaves.
bool is_atom(const ExprPtr& e);

// Visits e and every descendant, including scripts, bounds and differentials.
void walk(const ExprPtr& e, const std::function<void(const ExprPtr&)>& fn);

// The identity key of a Symbol/Greek atom: its emitted spelling, e.g.
// "y_{i}", "\\hat{y_{i}}", "\\theta", "\\mathcal{L}".  Assignments, renamings
// and binding environments are all keyed by this string.
std::string atom_key(const ExprPtr& e);

// Greek command names recognized in source and counted by the complexity
// metric ("\\pi" excluded: it parses as a constant, not an identifier).
bool is_greek_command(std::string_view name);

// The full recognized Greek list in its frozen order; fresh-symbol fallback
// walks it, so reordering would change every produced document.
const std::vector<std::string_view>& greek_command_names();

// Free symbol keys of e: every Symbol/Greek atom not bound by an enclosing
// big operator, plus a conservative over-approximation for Opaque content
// (every command-like identifier in the raw bytes).  Sorted, de-duplicated.
std::vector<std::string> free_symbols(const ExprPtr& e);

// Every identifier name that occurs anywhere in e (free or bound, including
// inside scripts and Opaque bytes).  Fresh-symbol selection avoids all of
// these, which is stronger than the freshness contract requires.
std::vector<std::string> all_names(const ExprPtr& e);

// Inserts Group nodes exactly where the emitter would be forced to print
// parentheses, and normalizes e^{x} power form to the exp function node.
// parse(emit(e)) == canonical(e) for every well-formed tree, and
// canonical(e) == e for every tree the parser or a rewrite pass produces.
ExprPtr canonical(const ExprPtr& e);

} // namespace z2h
