// metric.hpp - complexity scoring
//
// Quantifies how complicated an expression looks.  The weights are
// arbitrary by design but frozen as an external contract: reports are
// golden-tested, so changing a weight is a breaking change.  What the
// metric guarantees — and what the rewrite passes are tested against — is
// strict growth: wrapping a term in any shipped pass output raises total.

#pragma once

#include <cstddef>
#include <string>

#include "zero2hero/ast.hpp"

namespace z2h {

struct ComplexityScore {
    int node_count = 0;     // every AST node, scripts and bounds included
    int greek_count = 0;    // Greek nodes plus Greek command names in Opaque bytes
    int bigop_count = 0;    // Sum + Prod + Integral + ContourIntegral + Partial
    int max_depth = 0;      // leaf = 1
    int op_diversity = 0;   // distinct node kinds present
    int total = 0;          // node + 2*greek + 3*bigop + 2*depth + diversity
};

// Single-walk scorer.  A null expression (empty alignment cell) scores zero.
ComplexityScore score(const ExprPtr& e);

enum class Ordering { Less, Equal, Greater };

// Orders by total; ties break by (bigop_count, greek_count, node_count).
Ordering compare(const ComplexityScore& before, const ComplexityScore& after);

// One report row: "eq#<index> before=<total> after=<total> Δ=<int> greek +<int> bigops +<int>"
std::string score_row(std::size_t index, const ComplexityScore& before,
                      const ComplexityScore& after);

}  // namespace z2h
