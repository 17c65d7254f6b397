// oracle.hpp - numeric evaluation and equivalence certification
//
// The oracle is what lets an obfuscation pass call itself correct: it
// evaluates expressions under randomly drawn symbol assignments and checks
// that a rewrite did not change the value.  Evaluation is deliberately
// partial — anything without an obvious numeric reading (unknown commands,
// applied function atoms like f_i(x), contour integrals, derivatives)
// refuses to evaluate rather than guess, and the verdict for such
// equations is Indeterminate rather than a false PASS or FAIL.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "zero2hero/ast.hpp"
#include "zero2hero/rng.hpp"

namespace z2h {

// ============================================================================
// Evaluation
// ============================================================================

// Fixed physical constants the evaluator binds by itself.  h is the exact
// SI definition; hbar is derived, so 2·pi·hbar/h is 1 to the last bit.
inline constexpr double kPlanckH = 6.62607015e-34;

enum class EvalFailure : std::uint8_t {
    OpaquePresent,  // a construct with no numeric reading
    DomainError,    // log of a non-positive value, division by zero, overflow
    UnboundSymbol,  // a free symbol has no binding
};

struct EvalResult {
    std::optional<double> value;
    EvalFailure failure = EvalFailure::OpaquePresent;
    std::string detail;  // offending symbol for UnboundSymbol

    bool ok() const { return value.has_value(); }
};

// Symbol bindings, keyed by atom spelling ("x", "y_{i}", "\\hat{y_{i}}",
// "\\theta").  Constants are not entries; eval supplies them.
struct Assignment {
    std::map<std::string, double> bindings;
};

// Evaluates e under a.  Never throws and never aborts: every failure is an
// EvalResult carrying its reason.  Notable semantics, all deliberate:
//   - Sum/Prod iterate when both bounds are integer literals, otherwise
//     refuse (OpaquePresent) — no pass produces symbolic bounds.
//   - Integral evaluates only the constant-body form: when the body does
//     not mention the differential variable, the value is
//     (upper - lower) * body.
//   - A literal zero as the left factor of a multiplication short-circuits
//     to 0 without evaluating the right factor, even when that factor
//     would be a DomainError.  The zero-add decorator templates rely on
//     this masking.
//   - Any non-finite or subnormal intermediate is a DomainError: once
//     precision is gone, comparing values would only manufacture false
//     mismatches.
EvalResult eval(const ExprPtr& e, const Assignment& a);

// Binds every free symbol of e to a uniform draw from [-10,-0.1] ∪ [0.1,10]
// (zero avoided so incidental division by a bare symbol stays finite).
// Symbols are bound in sorted order, so equal (e, rng state) gives equal
// assignments.
Assignment random_assignment(const ExprPtr& e, Rng& rng);

// ============================================================================
// Equivalence verification
// ============================================================================

// Bijection old name -> new name produced by renaming passes.
using Renaming = std::map<std::string, std::string>;

enum class Verdict : std::uint8_t {
    Pass,
    Fail,
    Indeterminate,     // neither side has a numeric reading; nothing to compare
    BudgetExhausted,   // re-draws against DomainError exceeded 10x trials
};

struct VerificationReport {
    Verdict verdict = Verdict::Indeterminate;
    int trials_run = 0;         // comparison trials completed
    double max_deviation = 0.0; // largest relative deviation observed
};

// Samples `trials` assignments for original, maps them through the renaming
// (new symbols fresh in transformed get independent draws), and compares
// values at relative tolerance tol with a max(1,|v|) floor.  Trials where
// either side hits a DomainError are re-drawn, up to a total of 10x trials
// attempts.  Both sides refusing with OpaquePresent is Indeterminate; one
// side refusing while the other evaluates is a Fail, because a
// value-preserving rewrite cannot change evaluability.
VerificationReport verify_equiv(const ExprPtr& original, const ExprPtr& transformed,
                                const std::optional<Renaming>& renaming, int trials,
                                double tol, std::uint64_t seed);

}  // namespace z2h
