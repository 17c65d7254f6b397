// parser.hpp - recursive-descent parser for math-mode LaTeX

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "zero2hero/ast.hpp"

namespace z2h {

// Why a parse failed, with the byte offset (into the math source, not the
// whole document) where the problem was noticed.
struct ParseError {
    std::string reason;
    std::size_t offset = 0;
};

// A parse never throws.  On failure `expr` is null and `error` explains why;
// on success `expr` is the canonical tree (emitting it and re-parsing yields
// an equal tree).
struct ParseOutcome {
    ExprPtr expr;
    std::optional<ParseError> error;
    bool ok() const { return expr != nullptr; }
};

// Parse one math segment body (the text between the delimiters, exclusive).
ParseOutcome parse_math(std::string_view src);

} // namespace z2h
