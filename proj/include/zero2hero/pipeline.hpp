// pipeline.hpp - Document-level driver: scan, transform, verify, splice, report
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zero2hero/metric.hpp"

namespace z2h {

// ============================================================================
// Exit codes
// ============================================================================

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;        // I/O or configuration error
inline constexpr int kExitMarkerGuard = 3;   // input already transformed, no --force
inline constexpr int kExitVerification = 4;  // a pass broke equivalence (a bug)
inline constexpr int kExitStructure = 5;     // verify: math segment counts differ

// ============================================================================
// Configuration
// ============================================================================

struct RunConfig {
    std::string input;
    std::string output;
    std::optional<std::uint64_t> seed;  // default: content hash of the input
    int intensity = 3;                  // 0..5 passes per equation
    std::vector<std::string> passes;    // allow-list of pass ids; empty = all
    bool force = false;                 // override the already-transformed guard
    bool dry_run = false;               // full report, no file written
    int verify_trials = 20;
    double tolerance = 1e-9;
    bool serial = false;  // force the sequential equation loop (benchmarks)
};

// ============================================================================
// Report
// ============================================================================

enum class ReportMode { Run, Score, Verify };

struct EquationRow {
    std::size_t index = 0;  // equation ordinal (not segment index)
    bool parsed = false;
    std::vector<std::string> plan;
    std::string verdict;  // PASS | FAIL | INDETERMINATE | SKIP
    int trials = 0;
    double max_deviation = 0.0;
    ComplexityScore before;
    ComplexityScore after;
};

struct RunReport {
    ReportMode mode = ReportMode::Run;
    std::string input;
    std::string output;  // empty for score/verify or dry runs
    std::uint64_t seed = 0;
    int intensity = 3;
    int trials = 20;
    double tolerance = 1e-9;
    bool dry_run = false;
    std::vector<EquationRow> rows;  // one per math segment, in document order
    std::vector<std::string> warnings;
    // Document totals: sums/counts over rows.
    int total_before = 0;
    int total_after = 0;
    int transformed_count = 0;
    int skipped_count = 0;
    int pass_count = 0;
    int fail_count = 0;
    int indeterminate_count = 0;
};

// One command's outcome: the process exit code, the report (when
// `report_valid`), a human-readable message for nonzero exits, and the
// produced document bytes (run only; written to disk unless dry_run).
struct CommandResult {
    int exit_code = kExitOk;
    bool report_valid = false;
    RunReport report;
    std::string error;
    std::string output_bytes;
    bool output_written = false;
};

// ============================================================================
// Commands (content-level cores + file-level wrappers)
// ============================================================================

// Transforms every parseable equation, verifies each rewrite against the
// numeric oracle, and splices the result under a marker line.  Never
// produces output bytes it could not certify: a verification FAIL aborts
// with kExitVerification.
CommandResult run_on_content(std::string_view content, const RunConfig& config);
CommandResult run_document(const RunConfig& config);

// Parses and scores every equation; no transformation, no marker, no file.
CommandResult score_content(std::string_view content, const std::string& input_name);
CommandResult score_document(const std::string& input_path);

// Audits a prior run: re-pairs equations by position, replays the recorded
// transform from the marker's seed to reconstruct renamings, and verifies
// each pair.  Hand-edited equations that no replay explains are verified
// directly and reported FAIL when values diverge.
CommandResult verify_content(std::string_view original, std::string_view transformed,
                             const std::string& original_name, const std::string& transformed_name,
                             bool serial = false);
CommandResult verify_documents(const std::string& original_path,
                               const std::string& transformed_path, bool serial = false);

// ============================================================================
// Rendering
// ============================================================================

// Human-readable aligned text, one equation per row block.
void render_text(const RunReport& report, std::ostream& out);
// One JSON object per line: header, rows, warnings, totals.
void render_machine(const RunReport& report, std::ostream& out);

// ============================================================================
// Helpers exposed for tests
// ============================================================================

// FNV-1a content hash used as the default seed.
std::uint64_t content_seed(std::string_view bytes);

}  // namespace z2h
