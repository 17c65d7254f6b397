// test_pipeline.cpp - End-to-end run/score/verify pipeline tests
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <string>

#include "gen.hpp"
#include "zero2hero/pipeline.hpp"
#include "zero2hero/rng.hpp"
#include "zero2hero/scanner.hpp"

using namespace z2h;

namespace {

const char kDoc[] =
    "Intro prose with \\verb|$raw$| and an escaped \\% sign.\n"
    "$E = m c^{2}$ then some text.\n"
    "\\begin{equation}\n\\sum_{k=1}^{n} k + x\n\\end{equation}\n"
    "Closing \\(a - b\\) remark.\n";

RunConfig base_config() {
    RunConfig c;
    c.input = "doc.tex";
    c.output = "out.tex";
    c.seed = 42;
    c.intensity = 3;
    return c;
}

std::string prose_bytes(const std::string& text) {
    ScanResult r = scan(text);
    REQUIRE(r.ok());
    std::string out;
    for (const Segment& s : r.segments)
        if (s.kind == SegmentKind::Prose) out += s.raw;
    return out;
}

std::string strip_first_line(const std::string& text) {
    const std::size_t nl = text.find('\n');
    REQUIRE(nl != std::string::npos);
    return text.substr(nl + 1);
}

std::string rendered(const RunReport& report, bool machine = false) {
    std::ostringstream out;
    if (machine) render_machine(report, out);
    else render_text(report, out);
    return out.str();
}

} // namespace

// ============================================================================
// run
// ============================================================================

TEST_CASE("a run transforms every equation under a marker line") {
    CommandResult r = run_on_content(kDoc, base_config());
    REQUIRE(r.exit_code == kExitOk);
    REQUIRE(r.report_valid);
    REQUIRE(r.report.rows.size() == 3);

    for (const EquationRow& row : r.report.rows) {
        CHECK(row.parsed);
        CHECK(row.plan.size() == 3);
        CHECK((row.verdict == "PASS" || row.verdict == "INDETERMINATE"));
        CHECK(row.after.total > row.before.total);
    }
    CHECK(r.report.transformed_count == 3);
    CHECK(r.report.skipped_count == 0);
    CHECK(r.report.fail_count == 0);
    CHECK(r.report.total_before ==
          r.report.rows[0].before.total + r.report.rows[1].before.total +
              r.report.rows[2].before.total);

    MarkerScan m = detect_marker(r.output_bytes);
    CHECK(m.marker.present);
    CHECK(m.marker.seed == 42);
    CHECK(m.marker.intensity == 3);

    // Prose bytes are untouched apart from the marker line.
    CHECK(prose_bytes(strip_first_line(r.output_bytes)) == prose_bytes(kDoc));
}

TEST_CASE("two identical runs give identical bytes and reports") {
    CommandResult a = run_on_content(kDoc, base_config());
    CommandResult b = run_on_content(kDoc, base_config());
    CHECK(a.output_bytes == b.output_bytes);
    CHECK(rendered(a.report) == rendered(b.report));
    CHECK(rendered(a.report, true) == rendered(b.report, true));
}

TEST_CASE("intensity zero writes marker plus input verbatim") {
    RunConfig c = base_config();
    c.intensity = 0;
    CommandResult r = run_on_content(kDoc, c);
    REQUIRE(r.exit_code == kExitOk);
    CHECK(r.output_bytes == marker_line(42, 0) + kDoc);
    for (const EquationRow& row : r.report.rows) CHECK(row.plan.empty());
}

TEST_CASE("the default seed is the content hash") {
    RunConfig c = base_config();
    c.seed.reset();
    CommandResult r = run_on_content(kDoc, c);
    REQUIRE(r.exit_code == kExitOk);
    CHECK(r.report.seed == content_seed(kDoc));
    MarkerScan m = detect_marker(r.output_bytes);
    CHECK(m.marker.seed == content_seed(kDoc));
}

TEST_CASE("dry runs produce bytes but never write") {
    RunConfig c = base_config();
    c.dry_run = true;
    c.output.clear();
    CommandResult r = run_on_content(kDoc, c);
    CHECK(r.exit_code == kExitOk);
    CHECK(!r.output_bytes.empty());
    CHECK(!r.output_written);
}

// ============================================================================
// The double-application guard
// ============================================================================

TEST_CASE("running on produced output is refused") {
    CommandResult first = run_on_content(kDoc, base_config());
    REQUIRE(first.exit_code == kExitOk);

    CommandResult second = run_on_content(first.output_bytes, base_config());
    CHECK(second.exit_code == kExitMarkerGuard);
    CHECK(!second.error.empty());
    CHECK(second.error.find("--force") != std::string::npos);
    CHECK(second.output_bytes.empty());
}

TEST_CASE("force overrides the guard and leaves a single marker") {
    CommandResult first = run_on_content(kDoc, base_config());
    RunConfig c = base_config();
    c.force = true;
    CommandResult second = run_on_content(first.output_bytes, c);
    REQUIRE(second.exit_code == kExitOk);

    std::size_t markers = 0;
    std::istringstream lines(second.output_bytes);
    std::string line;
    while (std::getline(lines, line))
        if (line.rfind("% zero2hero:", 0) == 0) ++markers;
    CHECK(markers == 1);
}

TEST_CASE("a malformed marker line warns instead of refusing") {
    std::string doc = "% zero2hero: not quite a marker\n$x$\n";
    CommandResult r = run_on_content(doc, base_config());
    CHECK(r.exit_code == kExitOk);
    bool warned = false;
    for (const std::string& w : r.report.warnings)
        if (w.find("marker") != std::string::npos) warned = true;
    CHECK(warned);
}

// ============================================================================
// Degraded inputs
// ============================================================================

TEST_CASE("malformed equations are skipped, not failed") {
    std::string doc =
        "One $x + y$ two $\\frac{1}{$ three $a b$ four $\\left( z$ five $p^{2}$.\n";
    CommandResult r = run_on_content(doc, base_config());
    REQUIRE(r.exit_code == kExitOk);
    REQUIRE(r.report.rows.size() == 5);

    CHECK(r.report.transformed_count == 3);
    CHECK(r.report.skipped_count == 2);
    CHECK(!r.report.rows[1].parsed);
    CHECK(r.report.rows[1].verdict == "SKIP");
    CHECK(!r.report.rows[3].parsed);

    int skip_warnings = 0;
    for (const std::string& w : r.report.warnings)
        if (w.find("left unchanged") != std::string::npos) ++skip_warnings;
    CHECK(skip_warnings == 2);

    // The malformed inners are preserved byte for byte.
    CHECK(r.output_bytes.find("$\\frac{1}{$") != std::string::npos);
    CHECK(r.output_bytes.find("$\\left( z$") != std::string::npos);
}

TEST_CASE("a document with no math still succeeds") {
    CommandResult r = run_on_content("just words\n", base_config());
    CHECK(r.exit_code == kExitOk);
    CHECK(r.report.rows.empty());
    CHECK(r.output_bytes == marker_line(42, 3) + "just words\n");
}

// ============================================================================
// Configuration errors
// ============================================================================

TEST_CASE("bad configuration exits 2 with a message") {
    RunConfig c = base_config();
    c.intensity = 6;
    CHECK(run_on_content(kDoc, c).exit_code == kExitConfig);

    c = base_config();
    c.passes = {"planck", "nope"};
    CommandResult r = run_on_content(kDoc, c);
    CHECK(r.exit_code == kExitConfig);
    CHECK(r.error.find("nope") != std::string::npos);

    c = base_config();
    c.output = c.input;
    CHECK(run_on_content(kDoc, c).exit_code == kExitConfig);

    c = base_config();
    CHECK(run_on_content("broken $x", c).exit_code == kExitConfig);
    CommandResult unbalanced = run_on_content("broken $x", c);
    CHECK(unbalanced.error.find("byte") != std::string::npos);
}

TEST_CASE("an allow-list restricts every plan") {
    RunConfig c = base_config();
    c.passes = {"planck", "unit-sum"};
    CommandResult r = run_on_content(kDoc, c);
    REQUIRE(r.exit_code == kExitOk);
    for (const EquationRow& row : r.report.rows)
        for (const std::string& id : row.plan)
            CHECK((id == "planck" || id == "unit-sum"));
}

// ============================================================================
// score
// ============================================================================

TEST_CASE("score reports without transforming") {
    CommandResult r = score_content(kDoc, "doc.tex");
    REQUIRE(r.exit_code == kExitOk);
    REQUIRE(r.report.mode == ReportMode::Score);
    REQUIRE(r.report.rows.size() == 3);
    for (const EquationRow& row : r.report.rows) {
        CHECK(row.parsed);
        CHECK(row.before.total > 0);
        CHECK(row.after.total == 0);
    }
    CHECK(r.output_bytes.empty());
}

TEST_CASE("score of a mathless document is an empty report") {
    CommandResult r = score_content("nothing here\n", "doc.tex");
    CHECK(r.exit_code == kExitOk);
    CHECK(r.report.rows.empty());
}

// ============================================================================
// verify
// ============================================================================

TEST_CASE("verify passes every pair a run produced") {
    CommandResult run = run_on_content(kDoc, base_config());
    REQUIRE(run.exit_code == kExitOk);

    CommandResult v = verify_content(kDoc, run.output_bytes, "a.tex", "b.tex");
    REQUIRE(v.exit_code == kExitOk);
    REQUIRE(v.report.mode == ReportMode::Verify);
    REQUIRE(v.report.rows.size() == 3);
    CHECK(v.report.fail_count == 0);
    for (const EquationRow& row : v.report.rows)
        CHECK((row.verdict == "PASS" || row.verdict == "INDETERMINATE"));
}

TEST_CASE("verify reconstructs renamings after allow-listed runs") {
    RunConfig c = base_config();
    c.passes = {"planck", "greek-rename"};
    c.intensity = 4;
    CommandResult run = run_on_content(kDoc, c);
    REQUIRE(run.exit_code == kExitOk);

    CommandResult v = verify_content(kDoc, run.output_bytes, "a.tex", "b.tex");
    CHECK(v.exit_code == kExitOk);
    CHECK(v.report.fail_count == 0);
}

TEST_CASE("a hand-edited value fails verification") {
    CommandResult run = run_on_content("$x$\n", base_config());
    REQUIRE(run.exit_code == kExitOk);

    std::string tampered = run.output_bytes;
    const std::size_t close = tampered.rfind('$');
    REQUIRE(close != std::string::npos);
    tampered.insert(close, " + 1");

    CommandResult v = verify_content("$x$\n", tampered, "a.tex", "b.tex");
    CHECK(v.exit_code == kExitOk);
    CHECK(v.report.fail_count == 1);
}

TEST_CASE("verify requires the marker") {
    CommandResult v = verify_content(kDoc, kDoc, "a.tex", "b.tex");
    CHECK(v.exit_code == kExitConfig);
    CHECK(!v.error.empty());
}

TEST_CASE("mismatched math segment counts exit 5") {
    CommandResult run = run_on_content("$x$ and $y$\n", base_config());
    REQUIRE(run.exit_code == kExitOk);
    CommandResult v = verify_content("$x$\n", run.output_bytes, "a.tex", "b.tex");
    CHECK(v.exit_code == kExitStructure);
}

// ============================================================================
// Properties over random documents
// ============================================================================

TEST_CASE("prose is preserved on random documents") {
    Rng rng(606060);
    for (int i = 0; i < 60; ++i) {
        std::string doc = gen::document(rng);
        RunConfig c = base_config();
        c.seed = 1000 + i;
        c.intensity = 1 + (i % 5);
        CommandResult r = run_on_content(doc, c);
        REQUIRE(r.exit_code == kExitOk);
        CHECK(prose_bytes(strip_first_line(r.output_bytes)) == prose_bytes(doc));

        ScanResult s = scan(doc);
        std::size_t math_segments = 0;
        for (const Segment& seg : s.segments)
            if (seg.kind == SegmentKind::Math) ++math_segments;
        CHECK(r.report.rows.size() == math_segments);
    }
}

TEST_CASE("a second application is always refused") {
    Rng rng(717171);
    for (int i = 0; i < 30; ++i) {
        std::string doc = gen::document(rng);
        RunConfig c = base_config();
        c.seed = i;
        CommandResult first = run_on_content(doc, c);
        REQUIRE(first.exit_code == kExitOk);
        CommandResult second = run_on_content(first.output_bytes, c);
        CHECK(second.exit_code == kExitMarkerGuard);
    }
}

TEST_CASE("verify never fails on honestly produced documents") {
    Rng rng(828282);
    for (int i = 0; i < 25; ++i) {
        std::string doc = gen::document(rng);
        RunConfig c = base_config();
        c.seed = 5000 + i;
        c.intensity = 1 + (i % 5);
        CommandResult run = run_on_content(doc, c);
        REQUIRE(run.exit_code == kExitOk);
        CommandResult v = verify_content(doc, run.output_bytes, "a.tex", "b.tex");
        REQUIRE(v.exit_code == kExitOk);
        CHECK(v.report.fail_count == 0);
    }
}

// ============================================================================
// Report rendering
// ============================================================================

TEST_CASE("text reports carry one row per equation plus totals") {
    CommandResult r = run_on_content(kDoc, base_config());
    const std::string text = rendered(r.report);
    CHECK(text.find("eq#0") != std::string::npos);
    CHECK(text.find("eq#1") != std::string::npos);
    CHECK(text.find("eq#2") != std::string::npos);
    CHECK(text.find("totals:") != std::string::npos);
    CHECK(text.find("seed=42") != std::string::npos);
}

TEST_CASE("machine reports are one json object per line") {
    CommandResult r = run_on_content(kDoc, base_config());
    const std::string text = rendered(r.report, true);
    std::istringstream lines(text);
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        REQUIRE(!line.empty());
        CHECK(line.front() == '{');
        CHECK(line.back() == '}');
        ++count;
    }
    CHECK(count >= r.report.rows.size() + 2);  // header, rows, totals
}
