// passes.hpp - Value-preserving rewrite passes and per-equation planning
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "zero2hero/ast.hpp"
#include "zero2hero/metric.hpp"
#include "zero2hero/oracle.hpp"
#include "zero2hero/rng.hpp"

namespace z2h {

// ============================================================================
// Fresh symbol source
// ============================================================================

// Hands out Greek atoms whose spelling collides with nothing already present
// in the equation (free, bound, or opaque-embedded) and with nothing handed
// out earlier.  Construction snapshots the forbidden spellings; every fresh()
// call registers its result, so successive calls are pairwise distinct.
class FreshSymbolSource {
public:
    explicit FreshSymbolSource(const std::vector<std::string>& forbidden_keys);

    // A bare Greek atom, preferring `preferred` (a command name such as
    // "kappa"), falling back through the full Greek list, then to
    // subscripted variants of `preferred`.
    ExprPtr fresh(std::string_view preferred);

    // A Greek atom decorated like an existing victim atom (same subscript /
    // accent / style); the collision check runs against the decorated
    // spelling.  If every decorated Greek spelling is taken the decoration
    // is dropped rather than failing.
    ExprPtr fresh_like(std::string_view preferred, const ExprPtr& sub,
                       const std::optional<AccentKind>& accent,
                       const std::optional<std::string>& style);

private:
    ExprPtr claim(std::string_view preferred, const ExprPtr& sub,
                  const std::optional<AccentKind>& accent,
                  const std::optional<std::string>& style);

    std::set<std::string> used_;
};

// ============================================================================
// Pass catalog
// ============================================================================

// ExactIdentity passes keep the expression's value bit-for-bit comparable
// under the same assignment; Renaming passes preserve it only modulo the
// returned symbol substitution.
enum class SemanticsClass { ExactIdentity, Renaming };

struct RewriteResult {
    ExprPtr expr;
    // Present exactly when the pass's semantics class is Renaming:
    // old atom spelling -> new atom spelling.
    std::optional<Renaming> renaming;
};

struct TransformPass {
    std::string_view id;
    SemanticsClass semantics;
    bool (*applicable)(const ExprPtr&);
    RewriteResult (*apply)(const ExprPtr&, Rng&, FreshSymbolSource&);
};

// The full pass table in its frozen order; plan selection indexes into the
// subset of this order that an allow-list keeps, so the order is part of
// the deterministic-output contract.
const std::vector<TransformPass>& pass_catalog();

// Catalog lookup by stable id; nullptr when unknown.
const TransformPass* find_pass(std::string_view id);

// True when `id` names a catalog pass.
bool is_valid_pass_id(std::string_view id);

// ============================================================================
// Equation decomposition
// ============================================================================

// The rewritable leaves of an equation: relation operands, or per-row
// per-chunk payloads of a multi-row display, or the expression itself.
// Null slots (elided relation operands, empty chunks) are skipped.
std::vector<ExprPtr> equation_leaves(const ExprPtr& e);

// ============================================================================
// Planning and application
// ============================================================================

struct LeafResult {
    ExprPtr before;  // canonical leaf prior to any rewriting
    ExprPtr after;   // canonical leaf after the full plan
    Renaming sigma;  // composed renaming for this leaf (may be empty)
};

struct EquationRewrite {
    ExprPtr original;              // canonical input
    ExprPtr transformed;           // canonical output
    std::vector<std::string> plan; // applied pass ids, in order
    std::vector<LeafResult> leaves;
    // Whole-equation complexity totals: index 0 is the input, then one
    // entry per applied plan step.  Strictly increasing after index 0.
    std::vector<int> step_totals;
};

// Plans and applies `intensity` passes to one equation.  Deterministic in
// (seed, index, intensity, allowed): selection draws come from a stream
// keyed on (seed, index), each leaf application from a stream keyed on
// (seed, index, step, leaf), so equations can be transformed concurrently
// in any order without changing any byte.  An empty `allowed` list means
// the full catalog.  Selection never picks the same pass twice in a row
// unless the allow-list leaves no alternative.
EquationRewrite transform_equation(const ExprPtr& e, std::uint64_t seed,
                                   std::size_t index, int intensity,
                                   const std::vector<std::string>& allowed = {});

// Replays an explicit plan (skipping ids a leaf is inapplicable to, exactly
// as transform_equation does).  transform_equation followed by apply_plan
// with the plan it chose reproduces the same bytes.
EquationRewrite apply_plan(const ExprPtr& e, const std::vector<std::string>& plan,
                           std::uint64_t seed, std::size_t index);

// Chains `first` then `second`: lookups through the result behave like
// applying `first`'s renames and then `second`'s.
Renaming compose(const Renaming& first, const Renaming& second);

}  // namespace z2h
