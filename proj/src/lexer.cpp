// lexer.cpp - math-mode tokenizer

#include "zero2hero/lexer.hpp"

#include <cctype>

namespace z2h {

namespace {

bool is_op_char(char c) {
    switch (c) {
    case '+': case '-': case '*': case '/': case '=':
    case '<': case '>': case '(': case ')': case '[':
    case ']': case '|':
        return true;
    default:
        return false;
    }
}

bool is_space_char(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

} // namespace

TokenizeResult tokenize(std::string_view src) {
    TokenizeResult out;
    std::size_t i = 0;
    const std::size_t n = src.size();
    auto push = [&out](TokKind k, std::string_view text, std::size_t at) {
        out.tokens.push_back(Token{k, std::string(text), at});
    };
    while (i < n) {
        const char c = src[i];
        const unsigned char uc = static_cast<unsigned char>(c);
        if (uc < 0x20 && !is_space_char(c)) {
            out.illegal_at = i;
            return out;
        }
        if (is_space_char(c)) {
            std::size_t j = i;
            while (j < n && is_space_char(src[j])) ++j;
            push(TokKind::Space, src.substr(i, j - i), i);
            i = j;
            continue;
        }
        if (c == '%') {
            // Comment to end of line; the parser treats it as blank space.
            std::size_t j = i;
            while (j < n && src[j] != '\n') ++j;
            push(TokKind::Space, src.substr(i, j - i), i);
            i = j;
            continue;
        }
        if (c == '\\') {
            if (i + 1 < n && src[i + 1] == '\\') {
                push(TokKind::RowBreak, src.substr(i, 2), i);
                i += 2;
                continue;
            }
            std::size_t j = i + 1;
            while (j < n && std::isalpha(static_cast<unsigned char>(src[j]))) ++j;
            if (j == i + 1 && j < n) ++j; // single-character control sequence
            push(TokKind::Cmd, src.substr(i + 1, j - i - 1), i);
            i = j;
            continue;
        }
        if (std::isdigit(uc) || (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < n && src[j] == '.' && j + 1 < n && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (c == '.') { // leading-dot decimal such as .75
                j = i + 1;
                while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            push(TokKind::Number, src.substr(i, j - i), i);
            i = j;
            continue;
        }
        if (std::isalpha(uc)) {
            push(TokKind::Letter, src.substr(i, 1), i);
            ++i;
            continue;
        }
        switch (c) {
        case '{': push(TokKind::LBrace, src.substr(i, 1), i); ++i; continue;
        case '}': push(TokKind::RBrace, src.substr(i, 1), i); ++i; continue;
        case '_': push(TokKind::Sub, src.substr(i, 1), i); ++i; continue;
        case '^': push(TokKind::Sup, src.substr(i, 1), i); ++i; continue;
        case '&': push(TokKind::Amp, src.substr(i, 1), i); ++i; continue;
        default: break;
        }
        if (is_op_char(c)) {
            push(TokKind::Op, src.substr(i, 1), i);
            ++i;
            continue;
        }
        if (uc >= 0x80) {
            std::size_t j = i;
            while (j < n && static_cast<unsigned char>(src[j]) >= 0x80) ++j;
            push(TokKind::Raw, src.substr(i, j - i), i);
            i = j;
            continue;
        }
        push(TokKind::Punct, src.substr(i, 1), i);
        ++i;
    }
    return out;
}

} // namespace z2h
