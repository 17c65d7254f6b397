// lexer.hpp - tokenization of math-mode source

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace z2h {

enum class TokKind : std::uint8_t {
    Cmd,      // \name or single-character control sequence (text excludes the backslash)
    LBrace,   // {
    RBrace,   // }
    Sub,      // _
    Sup,      // ^
    Amp,      // &
    RowBreak, // double-backslash row separator
    Number,   // digit run with optional fractional part, exactly as written
    Letter,   // one ASCII letter
    Op,       // + - * / = < > ( ) [ ] |
    Punct,    // , ; . : ! ? ' and other printable loners
    Space,    // whitespace run or a % comment (ignored by the parser)
    Raw,      // run of non-ASCII bytes, kept verbatim
};

struct Token {
    TokKind kind;
    std::string text;   // exact source bytes, except Cmd drops the backslash
    std::size_t offset; // byte offset into the tokenized string
};

struct TokenizeResult {
    std::vector<Token> tokens;
    std::optional<std::size_t> illegal_at; // offset of a control byte, if any
    bool ok() const { return !illegal_at.has_value(); }
};

// Splits math source into tokens covering the input contiguously.  Never
// throws; a control byte other than \t \n \r stops tokenization and reports
// its offset.
TokenizeResult tokenize(std::string_view src);

} // namespace z2h
