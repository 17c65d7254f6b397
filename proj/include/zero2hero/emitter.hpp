// emitter.hpp - deterministic LaTeX rendering of expression trees

#pragma once

#include <string>

#include "zero2hero/ast.hpp"

namespace z2h {

// Renders e as LaTeX math (no surrounding delimiters).  Deterministic:
// equal trees produce identical bytes.  Scripts are always braced (x^{2}),
// groups always use \left/\right, and parentheses are inserted wherever the
// precedence of a child is too low for its context, so that re-parsing the
// output reconstructs canonical(e).
std::string emit(const ExprPtr& e);

// Emitted spelling of a Symbol/Greek atom including style, accent and
// subscript ("\\hat{y_{i}}").  This is the identity key used by assignments,
// renamings and bound-variable scoping.
std::string atom_key(const ExprPtr& e);

// Spelling of the same atom without subscript or accent ("\\mathcal{L}",
// "x").  Used when checking fresh candidates against base names.
std::string atom_head_key(const ExprPtr& e);

// True when e re-parses as exactly one factor of a juxtaposition chain.
// `tail` says whether e would be the last factor there: big operators are
// greedy, so they only stand alone in tail position.  The parser and the
// rewrite passes use this to insert an explicit Group wherever an operand
// placed in factor position would otherwise change shape on re-parse.
bool parses_as_single_factor(const ExprPtr& e, bool tail);

} // namespace z2h
