// test_lexer.cpp - Tokenization unit and property tests
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "gen.hpp"
#include "zero2hero/emitter.hpp"
#include "zero2hero/lexer.hpp"
#include "zero2hero/rng.hpp"

using namespace z2h;

namespace {

// Rebuilds the exact source from a token stream; Cmd tokens dropped their
// backslash, every other kind keeps its bytes verbatim.
std::string reassemble(const std::vector<Token>& toks) {
    std::string out;
    for (const Token& t : toks) {
        if (t.kind == TokKind::Cmd) out += '\\';
        out += t.text;
    }
    return out;
}

std::vector<TokKind> kinds(const std::string& src) {
    TokenizeResult r = tokenize(src);
    REQUIRE(r.ok());
    std::vector<TokKind> out;
    for (const Token& t : r.tokens) out.push_back(t.kind);
    return out;
}

} // namespace

// ============================================================================
// Token classification
// ============================================================================

TEST_CASE("commands drop the backslash and keep the name") {
    TokenizeResult r = tokenize("\\sum_{k=1}^{n} k");
    REQUIRE(r.ok());
    REQUIRE(!r.tokens.empty());
    CHECK(r.tokens[0].kind == TokKind::Cmd);
    CHECK(r.tokens[0].text == "sum");
    CHECK(r.tokens[0].offset == 0);

    std::vector<TokKind> k = kinds("\\sum_{k=1}^{n} k");
    CHECK(k == std::vector<TokKind>{TokKind::Cmd, TokKind::Sub, TokKind::LBrace, TokKind::Letter,
                                    TokKind::Op, TokKind::Number, TokKind::RBrace, TokKind::Sup,
                                    TokKind::LBrace, TokKind::Letter, TokKind::RBrace,
                                    TokKind::Space, TokKind::Letter});
}

TEST_CASE("single character control sequences are commands") {
    TokenizeResult r = tokenize("a \\, b \\; c");
    REQUIRE(r.ok());
    int cmds = 0;
    for (const Token& t : r.tokens)
        if (t.kind == TokKind::Cmd) {
            ++cmds;
            CHECK((t.text == "," || t.text == ";"));
        }
    CHECK(cmds == 2);
}

TEST_CASE("a double backslash is one row break token") {
    TokenizeResult r = tokenize("a \\\\ b");
    REQUIRE(r.ok());
    int breaks = 0;
    for (const Token& t : r.tokens)
        if (t.kind == TokKind::RowBreak) ++breaks;
    CHECK(breaks == 1);
    CHECK(reassemble(r.tokens) == "a \\\\ b");
}

TEST_CASE("numbers keep their fractional part as written") {
    TokenizeResult r = tokenize("3.75 + 12");
    REQUIRE(r.ok());
    REQUIRE(r.tokens[0].kind == TokKind::Number);
    CHECK(r.tokens[0].text == "3.75");
    bool saw_12 = false;
    for (const Token& t : r.tokens)
        if (t.kind == TokKind::Number && t.text == "12") saw_12 = true;
    CHECK(saw_12);
}

TEST_CASE("percent comments are absorbed into spacing") {
    TokenizeResult r = tokenize("x % trailing note with $ and \\]\ny");
    REQUIRE(r.ok());
    // Only letters and space-kind tokens: the comment never yields Op/Punct.
    for (const Token& t : r.tokens)
        CHECK((t.kind == TokKind::Letter || t.kind == TokKind::Space));
    CHECK(reassemble(r.tokens) == "x % trailing note with $ and \\]\ny");
}

TEST_CASE("operator and punctuation split") {
    std::vector<TokKind> k = kinds("(a+b)/c, d;");
    CHECK(k == std::vector<TokKind>{TokKind::Op, TokKind::Letter, TokKind::Op, TokKind::Letter,
                                    TokKind::Op, TokKind::Op, TokKind::Letter, TokKind::Punct,
                                    TokKind::Space, TokKind::Letter, TokKind::Punct});
}

TEST_CASE("non ascii bytes form raw runs") {
    TokenizeResult r = tokenize("x \xce\xb1\xce\xb2 y");
    REQUIRE(r.ok());
    bool saw_raw = false;
    for (const Token& t : r.tokens)
        if (t.kind == TokKind::Raw) {
            saw_raw = true;
            CHECK(t.text == "\xce\xb1\xce\xb2");
        }
    CHECK(saw_raw);
    CHECK(reassemble(r.tokens) == "x \xce\xb1\xce\xb2 y");
}

// ============================================================================
// Failure reporting
// ============================================================================

TEST_CASE("control bytes stop tokenization with their offset") {
    std::string src = "ab\x01zz";
    TokenizeResult r = tokenize(src);
    CHECK(!r.ok());
    REQUIRE(r.illegal_at.has_value());
    CHECK(*r.illegal_at == 2);
}

TEST_CASE("tab newline and carriage return are ordinary spacing") {
    TokenizeResult r = tokenize("a\tb\nc\rd");
    CHECK(r.ok());
    CHECK(reassemble(r.tokens) == "a\tb\nc\rd");
}

TEST_CASE("empty input gives an empty ok stream") {
    TokenizeResult r = tokenize("");
    CHECK(r.ok());
    CHECK(r.tokens.empty());
}

// ============================================================================
// Properties
// ============================================================================

TEST_CASE("tokens cover the input contiguously") {
    Rng rng(20250815);
    for (int i = 0; i < 500; ++i) {
        std::string src = emit(gen::expr(rng));
        TokenizeResult r = tokenize(src);
        REQUIRE(r.ok());
        std::string re;
        for (const Token& t : r.tokens) {
            CHECK(t.offset == re.size());
            if (t.kind == TokKind::Cmd) re += '\\';
            re += t.text;
        }
        CHECK(re == src);
    }
}

TEST_CASE("tokenization never throws on arbitrary bytes") {
    Rng rng(7);
    const std::string alphabet = "ax1+\\{}_^&%$ .,\n\t()[]|<>=\xc3\xa9";
    for (int i = 0; i < 2000; ++i) {
        std::string src;
        const std::size_t len = rng.below(40);
        for (std::size_t j = 0; j < len; ++j) src += alphabet[rng.below(alphabet.size())];
        TokenizeResult r = tokenize(src);
        if (r.ok()) CHECK(reassemble(r.tokens) == src);
        else CHECK(*r.illegal_at < src.size());
    }
}
