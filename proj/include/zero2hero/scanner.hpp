// scanner.hpp - lossless prose/math segmentation of LaTeX sources
//
// The scanner splits a document into alternating prose and math segments
// without interpreting anything beyond delimiter structure: concatenating
// the raw bytes of all segments reproduces the input exactly.  Rewritten
// math is put back with splice(), which substitutes new inner bytes inside
// the original delimiters and leaves every prose byte alone.
//
// A produced document starts with a one-line comment marker recording the
// seed and intensity of the run.  detect_marker() recognizes that line so
// the pipeline can refuse to process its own output twice.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace z2h {

// Version stamped into marker lines.
inline constexpr char kToolVersion[] = "1.0.0";

// ============================================================================
// Segments
// ============================================================================

enum class SegmentKind : std::uint8_t { Prose, Math };

enum class DelimForm : std::uint8_t {
    InlineDollar,    // $...$
    InlineParen,     // \(...\)
    DisplayDollar,   // $$...$$
    DisplayBracket,  // \[...\]
    Environment,     // \begin{name}...\end{name}
};

struct MathDelimiter {
    DelimForm form = DelimForm::InlineDollar;
    std::string env_name;  // Environment only; star stored separately
    bool starred = false;

    std::string open_text() const;
    std::string close_text() const;
};

struct Segment {
    SegmentKind kind = SegmentKind::Prose;
    std::string raw;  // exact source bytes, delimiters included for math

    // Math segments only.
    MathDelimiter delimiter;
    std::string inner;  // bytes strictly between the delimiters
};

struct ScanError {
    std::string reason;
    std::size_t offset = 0;  // byte offset of the delimiter left unbalanced
};

struct ScanResult {
    std::vector<Segment> segments;
    std::optional<ScanError> error;

    bool ok() const { return !error.has_value(); }
};

// Splits source into segments.  Comments, \verb arguments, and verbatim
// environments stay prose even when they contain $; \$ never opens math.
// Math environments recognized at top level: equation, align, gather,
// multline, eqnarray, displaymath, plus starred variants.  split/aligned
// only appear nested inside an already-open math segment, so the scanner
// leaves them to the parser.
ScanResult scan(std::string_view source);

// ============================================================================
// Run marker
// ============================================================================

struct DocumentMarker {
    bool present = false;
    std::uint64_t seed = 0;
    int intensity = 0;
    std::string tool_version;
};

struct MarkerScan {
    DocumentMarker marker;
    // First line resembles a marker but does not parse; the caller should
    // warn and treat the document as unmarked.
    bool malformed = false;
};

// Parses the first line of source against the marker grammar
//   % zero2hero: seed=<u64> intensity=<0-5> v=<semver>
// Anything else yields present=false; a line that starts like a marker but
// fails the grammar additionally sets malformed.
MarkerScan detect_marker(std::string_view source);

// Serializes a marker line, newline included.
std::string marker_line(std::uint64_t seed, int intensity);

// ============================================================================
// Splice
// ============================================================================

struct SpliceError {
    std::string reason;
};

struct SpliceResult {
    std::string text;
    std::optional<SpliceError> error;

    bool ok() const { return !error.has_value(); }
};

// Reassembles the document: optional marker line first, then every segment
// in order, with replaced math segments' inner bytes substituted inside
// their original delimiters.  Keys of replacements are segment indices and
// must refer to math segments.  A replacement that would prematurely close
// its enclosing delimiter (a stray $ inside $...$, an \end{...} matching
// the environment, ...) is rejected rather than emitted broken.
SpliceResult splice(const std::vector<Segment>& segments,
                    const std::map<std::size_t, std::string>& replacements,
                    const DocumentMarker& marker);

}  // namespace z2h
