// scanner.cpp - lossless prose/math segmentation of LaTeX sources
//
// The scanner walks the document byte by byte and only ever interprets
// delimiter structure.  Escapes are resolved by consuming backslash pairs
// (\$, \%, \\ and friends) before the escaped byte is examined, so a $ or
// % reached by the main loop is always a live delimiter or comment start.
// Comment lines, \verb arguments, and verbatim environments are folded
// into the surrounding prose without inspection, which is what makes the
// partition lossless: every byte lands in exactly one segment's raw slice.

#include "zero2hero/scanner.hpp"

#include <array>
#include <charconv>
#include <string>

namespace z2h {

namespace {

constexpr std::size_t npos = std::string_view::npos;

// Environments whose bodies are display math when they appear at document
// level.  split/aligned are deliberately absent: they only occur nested
// inside one of these, so the scanner keeps them inside `inner` and the
// math parser deals with them.
constexpr std::array<std::string_view, 6> kMathEnvs = {
    "equation", "align", "gather", "multline", "eqnarray", "displaymath",
};

bool is_math_env(std::string_view name) {
    for (std::string_view e : kMathEnvs)
        if (name == e) return true;
    return false;
}

bool is_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// True when the byte at pos sits behind an odd number of backslashes and is
// therefore escaped rather than syntactic.
bool escaped(std::string_view s, std::size_t pos) {
    std::size_t run = 0;
    while (run < pos && s[pos - 1 - run] == '\\') ++run;
    return run % 2 == 1;
}

// First unescaped occurrence of a control sequence (text starts with '\\')
// at or after from.
std::size_t find_control(std::string_view s, std::string_view text, std::size_t from) {
    for (std::size_t p = from; (p = s.find(text, p)) != npos; ++p)
        if (!escaped(s, p)) return p;
    return npos;
}

// First unescaped '$' at or after from.
std::size_t find_dollar(std::string_view s, std::size_t from) {
    for (std::size_t p = from; (p = s.find('$', p)) != npos; ++p)
        if (!escaped(s, p)) return p;
    return npos;
}

struct EnvOpen {
    std::string name;
    bool starred = false;
    std::size_t body = 0;  // absolute index just past the opening '}'
};

// Matches "\begin{name}" or "\begin{name*}" with s[i] at the backslash.
// Anything looser (space before the brace, empty name) is left to prose.
std::optional<EnvOpen> parse_env_open(std::string_view s, std::size_t i) {
    std::size_t j = i + 6;  // past "\begin"
    if (j >= s.size() || s[j] != '{') return std::nullopt;
    std::size_t k = ++j;
    while (k < s.size() && is_letter(s[k])) ++k;
    if (k == j) return std::nullopt;
    bool star = k < s.size() && s[k] == '*';
    std::size_t close = k + (star ? 1 : 0);
    if (close >= s.size() || s[close] != '}') return std::nullopt;
    return EnvOpen{std::string(s.substr(j, k - j)), star, close + 1};
}

}  // namespace

// ============================================================================
// Delimiter spellings
// ============================================================================

std::string MathDelimiter::open_text() const {
    switch (form) {
        case DelimForm::InlineDollar: return "$";
        case DelimForm::InlineParen: return "\\(";
        case DelimForm::DisplayDollar: return "$$";
        case DelimForm::DisplayBracket: return "\\[";
        case DelimForm::Environment:
            return "\\begin{" + env_name + (starred ? "*" : "") + "}";
    }
    return {};
}

std::string MathDelimiter::close_text() const {
    switch (form) {
        case DelimForm::InlineDollar: return "$";
        case DelimForm::InlineParen: return "\\)";
        case DelimForm::DisplayDollar: return "$$";
        case DelimForm::DisplayBracket: return "\\]";
        case DelimForm::Environment:
            return "\\end{" + env_name + (starred ? "*" : "") + "}";
    }
    return {};
}

// ============================================================================
// Scan
// ============================================================================

ScanResult scan(std::string_view src) {
    ScanResult out;
    std::string prose;

    auto flush_prose = [&] {
        if (prose.empty()) return;
        Segment s;
        s.kind = SegmentKind::Prose;
        s.raw = std::move(prose);
        out.segments.push_back(std::move(s));
        prose.clear();
    };

    // Appends one math segment spanning src[start, stop) with inner bytes
    // src[inner_b, inner_e).
    auto push_math = [&](DelimForm form, std::string env, bool star,
                         std::size_t start, std::size_t inner_b,
                         std::size_t inner_e, std::size_t stop) {
        flush_prose();
        Segment s;
        s.kind = SegmentKind::Math;
        s.raw = std::string(src.substr(start, stop - start));
        s.delimiter.form = form;
        s.delimiter.env_name = std::move(env);
        s.delimiter.starred = star;
        s.inner = std::string(src.substr(inner_b, inner_e - inner_b));
        out.segments.push_back(std::move(s));
    };

    auto unbalanced = [&](std::size_t at, const char* what) {
        out.error = ScanError{std::string("unbalanced math delimiter: ") + what, at};
    };

    const std::size_t n = src.size();
    std::size_t i = 0;
    while (i < n) {
        const char c = src[i];

        // Comment: unescaped % through end of line stays prose, $ included.
        if (c == '%') {
            std::size_t eol = src.find('\n', i);
            std::size_t stop = eol == npos ? n : eol + 1;
            prose.append(src.substr(i, stop - i));
            i = stop;
            continue;
        }

        if (c == '$') {
            if (i + 1 < n && src[i + 1] == '$') {
                // $$...$$ — close at the next unescaped $ pair.
                std::size_t k = i + 2;
                while (true) {
                    k = find_dollar(src, k);
                    if (k == npos) return unbalanced(i, "$$ without closing $$"), out;
                    if (k + 1 < n && src[k + 1] == '$') break;
                    ++k;
                }
                push_math(DelimForm::DisplayDollar, {}, false, i, i + 2, k, k + 2);
                i = k + 2;
            } else {
                std::size_t k = find_dollar(src, i + 1);
                if (k == npos) return unbalanced(i, "$ without closing $"), out;
                push_math(DelimForm::InlineDollar, {}, false, i, i + 1, k, k + 1);
                i = k + 1;
            }
            continue;
        }

        if (c == '\\' && i + 1 < n) {
            const char d = src[i + 1];

            if (d == '(') {
                std::size_t k = find_control(src, "\\)", i + 2);
                if (k == npos) return unbalanced(i, "\\( without closing \\)"), out;
                push_math(DelimForm::InlineParen, {}, false, i, i + 2, k, k + 2);
                i = k + 2;
                continue;
            }
            if (d == '[') {
                std::size_t k = find_control(src, "\\]", i + 2);
                if (k == npos) return unbalanced(i, "\\[ without closing \\]"), out;
                push_math(DelimForm::DisplayBracket, {}, false, i, i + 2, k, k + 2);
                i = k + 2;
                continue;
            }

            // \verb<delim>...<delim> (optionally \verb*): the argument is
            // read verbatim, so its bytes go straight to prose.  A letter
            // right after "verb" means a longer command name, not \verb.
            if (src.substr(i, 5) == "\\verb") {
                std::size_t j = i + 5;
                if (j < n && src[j] == '*') ++j;
                if (j < n && !is_letter(src[j])) {
                    const char delim = src[j];
                    std::size_t k = src.find(delim, j + 1);
                    std::size_t stop = k == npos ? n : k + 1;
                    prose.append(src.substr(i, stop - i));
                    i = stop;
                    continue;
                }
            }

            if (src.substr(i, 6) == "\\begin") {
                if (auto env = parse_env_open(src, i)) {
                    if (env->name == "verbatim") {
                        // Body is uninterpreted; swallow through \end{verbatim}.
                        std::string closer =
                            std::string("\\end{verbatim") + (env->starred ? "*}" : "}");
                        std::size_t k = find_control(src, closer, env->body);
                        std::size_t stop = k == npos ? n : k + closer.size();
                        prose.append(src.substr(i, stop - i));
                        i = stop;
                        continue;
                    }
                    if (is_math_env(env->name)) {
                        std::string closer = "\\end{" + env->name + (env->starred ? "*}" : "}");
                        std::size_t k = find_control(src, closer, env->body);
                        if (k == npos)
                            return unbalanced(i, "environment without matching \\end"), out;
                        push_math(DelimForm::Environment, env->name, env->starred,
                                  i, env->body, k, k + closer.size());
                        i = k + closer.size();
                        continue;
                    }
                    // Any other environment is prose; consume the opener so
                    // its braces are not rescanned.
                    prose.append(src.substr(i, env->body - i));
                    i = env->body;
                    continue;
                }
            }

            // Generic two-byte escape (\$, \%, \\, \&, ...) or the start of
            // an uninteresting control word: take the pair so the second
            // byte can never be misread as a delimiter.
            prose.append(src.substr(i, 2));
            i += 2;
            continue;
        }

        prose += c;
        ++i;
    }
    flush_prose();
    return out;
}

// ============================================================================
// Marker
// ============================================================================

namespace {

bool consume(std::string_view& s, std::string_view lit) {
    if (s.substr(0, lit.size()) != lit) return false;
    s.remove_prefix(lit.size());
    return true;
}

std::size_t digit_run(std::string_view s) {
    std::size_t k = 0;
    while (k < s.size() && is_digit(s[k])) ++k;
    return k;
}

// Strict body parse of everything after the "% zero2hero:" prefix.
std::optional<DocumentMarker> parse_marker_body(std::string_view rest) {
    DocumentMarker m;
    if (!consume(rest, " seed=")) return std::nullopt;
    std::size_t d = digit_run(rest);
    if (d == 0 || d > 20) return std::nullopt;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + d, m.seed);
    if (ec != std::errc() || ptr != rest.data() + d) return std::nullopt;
    rest.remove_prefix(d);

    if (!consume(rest, " intensity=")) return std::nullopt;
    if (rest.empty() || rest[0] < '0' || rest[0] > '5') return std::nullopt;
    m.intensity = rest[0] - '0';
    rest.remove_prefix(1);
    if (!rest.empty() && is_digit(rest[0])) return std::nullopt;

    if (!consume(rest, " v=")) return std::nullopt;
    int components = 0;
    while (true) {
        std::size_t k = digit_run(rest);
        if (k == 0) return std::nullopt;
        m.tool_version.append(rest.substr(0, k));
        rest.remove_prefix(k);
        ++components;
        if (!rest.empty() && rest[0] == '.' && components < 3) {
            m.tool_version += '.';
            rest.remove_prefix(1);
            continue;
        }
        break;
    }
    if (!rest.empty()) return std::nullopt;

    m.present = true;
    return m;
}

}  // namespace

MarkerScan detect_marker(std::string_view source) {
    MarkerScan out;
    std::size_t eol = source.find('\n');
    std::string_view line = source.substr(0, eol == npos ? source.size() : eol);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    constexpr std::string_view kPrefix = "% zero2hero:";
    if (line.substr(0, kPrefix.size()) != kPrefix) return out;

    if (auto m = parse_marker_body(line.substr(kPrefix.size()))) {
        out.marker = *m;
    } else {
        out.malformed = true;
    }
    return out;
}

std::string marker_line(std::uint64_t seed, int intensity) {
    std::string line = "% zero2hero: seed=";
    line += std::to_string(seed);
    line += " intensity=";
    line += std::to_string(intensity);
    line += " v=";
    line += kToolVersion;
    line += '\n';
    return line;
}

// ============================================================================
// Splice
// ============================================================================

namespace {

// Would these bytes close the enclosing delimiter before its real closer?
bool closes_early(const MathDelimiter& d, std::string_view bytes) {
    switch (d.form) {
        case DelimForm::InlineDollar:
        case DelimForm::DisplayDollar:
            return find_dollar(bytes, 0) != npos;
        case DelimForm::InlineParen:
            return find_control(bytes, "\\)", 0) != npos;
        case DelimForm::DisplayBracket:
            return find_control(bytes, "\\]", 0) != npos;
        case DelimForm::Environment:
            return find_control(bytes, d.close_text(), 0) != npos;
    }
    return false;
}

}  // namespace

SpliceResult splice(const std::vector<Segment>& segments,
                    const std::map<std::size_t, std::string>& replacements,
                    const DocumentMarker& marker) {
    SpliceResult out;
    for (const auto& [idx, bytes] : replacements) {
        if (idx >= segments.size()) {
            out.error = SpliceError{"replacement index " + std::to_string(idx) +
                                    " is out of range"};
            return out;
        }
        if (segments[idx].kind != SegmentKind::Math) {
            out.error = SpliceError{"replacement index " + std::to_string(idx) +
                                    " refers to a prose segment"};
            return out;
        }
        if (closes_early(segments[idx].delimiter, bytes)) {
            out.error = SpliceError{"replacement for segment " + std::to_string(idx) +
                                    " would close its math delimiter early"};
            return out;
        }
    }

    if (marker.present) out.text += marker_line(marker.seed, marker.intensity);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        auto it = replacements.find(i);
        if (it == replacements.end()) {
            out.text += segments[i].raw;
        } else {
            const Segment& s = segments[i];
            out.text += s.delimiter.open_text();
            out.text += it->second;
            out.text += s.delimiter.close_text();
        }
    }
    return out;
}

}  // namespace z2h
