// pipeline.cpp - Document-level driver: scan, transform, verify, splice, report

#include "zero2hero/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "zero2hero/emitter.hpp"
#include "zero2hero/oracle.hpp"
#include "zero2hero/parser.hpp"
#include "zero2hero/passes.hpp"
#include "zero2hero/rng.hpp"
#include "zero2hero/scanner.hpp"

namespace z2h {

namespace {

// ============================================================================
// Small helpers
// ============================================================================

constexpr std::string_view kVerdictPass = "PASS";
constexpr std::string_view kVerdictFail = "FAIL";
constexpr std::string_view kVerdictIndeterminate = "INDETERMINATE";
constexpr std::string_view kVerdictSkip = "SKIP";

std::uint64_t verify_seed(std::uint64_t seed, std::size_t eq, std::size_t leaf) {
    return mix_u64(mix_u64(seed ^ 0x7665726966790000ull) ^
                   ((static_cast<std::uint64_t>(eq) << 20) | static_cast<std::uint64_t>(leaf)));
}

std::optional<std::string> read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "cannot open " + path + " for reading";
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) return "error while reading " + path;
    out = buf.str();
    return std::nullopt;
}

std::optional<std::string> write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return "cannot open " + path + " for writing";
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) return "error while writing " + path;
    return std::nullopt;
}

// Folds one leaf verdict into an equation verdict: any FAIL wins, then any
// INDETERMINATE (budget exhaustion included), else PASS.
void fold_verdict(std::string& acc, Verdict leaf) {
    if (acc == kVerdictFail) return;
    switch (leaf) {
        case Verdict::Fail: acc = kVerdictFail; break;
        case Verdict::Indeterminate:
        case Verdict::BudgetExhausted: acc = kVerdictIndeterminate; break;
        case Verdict::Pass:
            if (acc.empty()) acc = kVerdictPass;
            break;
    }
}

// Verifies every leaf of a rewrite and accumulates row statistics.
struct LeafAudit {
    std::string verdict;  // folded over leaves; PASS when there are none
    int trials = 0;
    double max_deviation = 0.0;
    bool budget_exhausted = false;
};

LeafAudit audit_leaves(const EquationRewrite& tr, std::uint64_t seed, std::size_t eq_index,
                       int trials, double tolerance) {
    LeafAudit audit;
    for (std::size_t li = 0; li < tr.leaves.size(); ++li) {
        const LeafResult& leaf = tr.leaves[li];
        std::optional<Renaming> sigma;
        if (!leaf.sigma.empty()) sigma = leaf.sigma;
        VerificationReport vr = verify_equiv(leaf.before, leaf.after, sigma, trials, tolerance,
                                             verify_seed(seed, eq_index, li));
        fold_verdict(audit.verdict, vr.verdict);
        audit.trials += vr.trials_run;
        audit.max_deviation = std::max(audit.max_deviation, vr.max_deviation);
        audit.budget_exhausted |= vr.verdict == Verdict::BudgetExhausted;
    }
    if (audit.verdict.empty()) audit.verdict = kVerdictPass;
    return audit;
}

// ============================================================================
// Per-equation work for `run`
// ============================================================================

struct EqTask {
    std::size_t segment_index = 0;
    std::size_t eq_index = 0;
    std::string_view inner;
};

struct EqOutcome {
    EquationRow row;
    std::optional<std::string> replacement;
    std::vector<std::string> warnings;
    bool failed = false;  // verification FAIL: the run must abort
};

EqOutcome process_equation(const EqTask& task, std::uint64_t seed, int intensity,
                           const std::vector<std::string>& passes, int trials, double tolerance) {
    EqOutcome out;
    out.row.index = task.eq_index;

    ParseOutcome parsed = parse_math(task.inner);
    if (!parsed.ok()) {
        out.row.parsed = false;
        out.row.verdict = kVerdictSkip;
        std::ostringstream w;
        w << "eq#" << task.eq_index << " left unchanged: parse error at byte "
          << parsed.error->offset << ": " << parsed.error->reason;
        out.warnings.push_back(w.str());
        return out;
    }

    out.row.parsed = true;
    EquationRewrite tr = transform_equation(parsed.expr, seed, task.eq_index, intensity, passes);
    out.row.plan = tr.plan;
    out.row.before = score(tr.original);
    out.row.after = score(tr.transformed);

    if (tr.plan.empty()) {
        // Nothing applied (intensity 0, or no applicable pass): the segment
        // keeps its original bytes, so there is nothing to certify.
        out.row.verdict = kVerdictPass;
        return out;
    }

    LeafAudit audit = audit_leaves(tr, seed, task.eq_index, trials, tolerance);
    out.row.verdict = audit.verdict;
    out.row.trials = audit.trials;
    out.row.max_deviation = audit.max_deviation;
    if (audit.budget_exhausted) {
        std::ostringstream w;
        w << "eq#" << task.eq_index
          << ": verification redraw budget exhausted (domain errors on most assignments); "
             "verdict demoted to INDETERMINATE";
        out.warnings.push_back(w.str());
    }
    if (audit.verdict == kVerdictFail) {
        out.failed = true;
        return out;  // no replacement: the run aborts anyway
    }
    out.replacement = emit(tr.transformed);
    return out;
}

// Runs one task list, concurrently when OpenMP is available and the config
// does not force the sequential loop.  Results land in a vector indexed by
// task position, so assembly order never depends on scheduling.
template <typename Task, typename Fn>
std::vector<EqOutcome> map_tasks(const std::vector<Task>& tasks, bool serial, Fn fn) {
    std::vector<EqOutcome> results(tasks.size());
#if defined(Z2H_HAVE_OPENMP)
    if (!serial) {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = fn(tasks[i]);
        return results;
    }
#else
    (void)serial;
#endif
    for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = fn(tasks[i]);
    return results;
}

void fold_row_totals(RunReport& report) {
    for (const EquationRow& row : report.rows) {
        if (!row.parsed) {
            ++report.skipped_count;
            continue;
        }
        report.total_before += row.before.total;
        report.total_after += row.after.total;
        if (!row.plan.empty()) ++report.transformed_count;
        if (row.verdict == kVerdictPass) ++report.pass_count;
        else if (row.verdict == kVerdictFail) ++report.fail_count;
        else if (row.verdict == kVerdictIndeterminate) ++report.indeterminate_count;
    }
}

CommandResult config_error(std::string message) {
    CommandResult r;
    r.exit_code = kExitConfig;
    r.error = std::move(message);
    return r;
}

}  // namespace

// ============================================================================
// run
// ============================================================================

std::uint64_t content_seed(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a 64
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

CommandResult run_on_content(std::string_view content, const RunConfig& config) {
    if (config.intensity < 0 || config.intensity > 5)
        return config_error("intensity must be between 0 and 5");
    for (const std::string& id : config.passes)
        if (!is_valid_pass_id(id)) return config_error("unknown pass id: " + id);
    if (!config.dry_run && config.output.empty())
        return config_error("no output path given (use --dry-run to skip writing)");
    if (!config.output.empty() && config.output == config.input && !config.force)
        return config_error("output path equals input path (pass --force to overwrite in place)");

    ScanResult scanned = scan(content);
    if (!scanned.ok())
        return config_error("unbalanced math delimiter at byte " +
                            std::to_string(scanned.error->offset));

    MarkerScan marker_scan = detect_marker(content);
    if (marker_scan.marker.present && !config.force) {
        CommandResult r;
        r.exit_code = kExitMarkerGuard;
        std::ostringstream msg;
        msg << "refusing to transform " << (config.input.empty() ? "input" : config.input)
            << ": its first line is a zero2hero marker (seed="
            << marker_scan.marker.seed << ", intensity=" << marker_scan.marker.intensity
            << "), so the document was already processed once. Equations in it are no longer "
               "simple, and a second application would only compound them; rerun with --force "
               "to do it anyway.";
        r.error = msg.str();
        return r;
    }

    CommandResult result;
    RunReport& report = result.report;
    report.mode = ReportMode::Run;
    report.input = config.input;
    report.output = config.dry_run ? std::string{} : config.output;
    report.seed = config.seed ? *config.seed : content_seed(content);
    report.intensity = config.intensity;
    report.trials = config.verify_trials;
    report.tolerance = config.tolerance;
    report.dry_run = config.dry_run;
    if (marker_scan.malformed)
        report.warnings.push_back(
            "first line looks like a marker but does not parse; treating it as prose");

    std::vector<EqTask> tasks;
    for (std::size_t si = 0; si < scanned.segments.size(); ++si) {
        const Segment& seg = scanned.segments[si];
        if (seg.kind != SegmentKind::Math) continue;
        tasks.push_back({si, tasks.size(), seg.inner});
    }

    std::vector<EqOutcome> outcomes =
        map_tasks(tasks, config.serial, [&](const EqTask& task) {
            return process_equation(task, report.seed, config.intensity, config.passes,
                                    config.verify_trials, config.tolerance);
        });

    std::map<std::size_t, std::string> replacements;
    bool verification_failed = false;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        EqOutcome& oc = outcomes[i];
        report.rows.push_back(oc.row);
        for (std::string& w : oc.warnings) report.warnings.push_back(std::move(w));
        verification_failed |= oc.failed;
        if (oc.replacement) replacements.emplace(tasks[i].segment_index, std::move(*oc.replacement));
    }
    fold_row_totals(report);
    result.report_valid = true;

    if (verification_failed) {
        result.exit_code = kExitVerification;
        result.error =
            "internal verification failure: a rewrite changed an equation's value; "
            "no output was produced (this is a bug in the tool, not in the document)";
        return result;
    }

    // Under --force on an already-marked document, drop the stale marker line
    // so the output carries exactly one.
    std::vector<Segment> segments = scanned.segments;
    if (marker_scan.marker.present && config.force && !segments.empty() &&
        segments[0].kind == SegmentKind::Prose && !segments[0].raw.empty() &&
        segments[0].raw[0] == '%') {
        std::size_t eol = segments[0].raw.find('\n');
        segments[0].raw = eol == std::string::npos ? std::string{}
                                                   : segments[0].raw.substr(eol + 1);
    }

    DocumentMarker marker;
    marker.present = true;
    marker.seed = report.seed;
    marker.intensity = config.intensity;
    marker.tool_version = kToolVersion;
    SpliceResult spliced = splice(segments, replacements, marker);
    if (!spliced.ok()) {
        result.exit_code = kExitVerification;
        result.error = "internal splice failure: " + spliced.error->reason;
        return result;
    }
    result.output_bytes = std::move(spliced.text);
    return result;
}

CommandResult run_document(const RunConfig& config) {
    std::string content;
    if (auto err = read_file(config.input, content)) return config_error(*err);
    CommandResult result = run_on_content(content, config);
    if (result.exit_code == kExitOk && !config.dry_run) {
        if (auto err = write_file(config.output, result.output_bytes)) {
            CommandResult io = config_error(*err);
            io.report = std::move(result.report);
            io.report_valid = result.report_valid;
            return io;
        }
        result.output_written = true;
    }
    return result;
}

// ============================================================================
// score
// ============================================================================

CommandResult score_content(std::string_view content, const std::string& input_name) {
    ScanResult scanned = scan(content);
    if (!scanned.ok())
        return config_error("unbalanced math delimiter at byte " +
                            std::to_string(scanned.error->offset));

    CommandResult result;
    RunReport& report = result.report;
    report.mode = ReportMode::Score;
    report.input = input_name;
    result.report_valid = true;

    std::size_t eq_index = 0;
    for (const Segment& seg : scanned.segments) {
        if (seg.kind != SegmentKind::Math) continue;
        EquationRow row;
        row.index = eq_index;
        ParseOutcome parsed = parse_math(seg.inner);
        if (parsed.ok()) {
            row.parsed = true;
            row.before = score(parsed.expr);
            report.total_before += row.before.total;
        } else {
            row.parsed = false;
            row.verdict = kVerdictSkip;
            std::ostringstream w;
            w << "eq#" << eq_index << " not scored: parse error at byte " << parsed.error->offset
              << ": " << parsed.error->reason;
            report.warnings.push_back(w.str());
            ++report.skipped_count;
        }
        report.rows.push_back(std::move(row));
        ++eq_index;
    }
    return result;
}

CommandResult score_document(const std::string& input_path) {
    std::string content;
    if (auto err = read_file(input_path, content)) return config_error(*err);
    return score_content(content, input_path);
}

// ============================================================================
// verify
// ============================================================================

namespace {

struct PairTask {
    std::size_t eq_index = 0;
    std::string_view inner_original;
    std::string_view inner_transformed;
};

// Replays the recorded transform, trying the full catalog first and then
// every proper allow-list subset (the allow-list is not recorded in the
// marker), looking for the replay whose emitted bytes match the transformed
// segment exactly; that replay's renamings are the reconstruction.
const int kVerifyTrials = 20;
const double kVerifyTolerance = 1e-9;

EqOutcome process_pair(const PairTask& task, std::uint64_t seed, int intensity) {
    EqOutcome out;
    out.row.index = task.eq_index;
    out.row.parsed = true;

    if (task.inner_original == task.inner_transformed) {
        // Untouched segment (skipped, or nothing applied): trivially faithful.
        out.row.verdict = kVerdictPass;
        return out;
    }

    ParseOutcome original = parse_math(task.inner_original);
    if (!original.ok()) {
        out.row.verdict = kVerdictIndeterminate;
        std::ostringstream w;
        w << "eq#" << task.eq_index
          << ": original does not parse, but the transformed bytes differ; cannot replay";
        out.warnings.push_back(w.str());
        return out;
    }

    const std::vector<TransformPass>& catalog = pass_catalog();
    const std::size_t n = catalog.size();
    std::optional<EquationRewrite> matched;
    EquationRewrite full = transform_equation(original.expr, seed, task.eq_index, intensity);
    if (emit(full.transformed) == task.inner_transformed) {
        matched = std::move(full);
    } else {
        const std::uint64_t full_mask = (1ull << n) - 1;
        for (std::uint64_t mask = 1; mask < full_mask && !matched; ++mask) {
            std::vector<std::string> allowed;
            for (std::size_t b = 0; b < n; ++b)
                if (mask & (1ull << b)) allowed.emplace_back(catalog[b].id);
            EquationRewrite cand =
                transform_equation(original.expr, seed, task.eq_index, intensity, allowed);
            if (emit(cand.transformed) == task.inner_transformed) matched = std::move(cand);
        }
    }

    if (matched) {
        LeafAudit audit =
            audit_leaves(*matched, seed, task.eq_index, kVerifyTrials, kVerifyTolerance);
        out.row.verdict = audit.verdict;
        out.row.trials = audit.trials;
        out.row.max_deviation = audit.max_deviation;
        if (audit.budget_exhausted) {
            std::ostringstream w;
            w << "eq#" << task.eq_index << ": verification redraw budget exhausted";
            out.warnings.push_back(w.str());
        }
        return out;
    }

    // No replay explains these bytes: the equation was edited by hand.
    // Verify the edited content directly against the original, leaf by leaf,
    // with no renaming credit.
    ParseOutcome edited = parse_math(task.inner_transformed);
    if (!edited.ok()) {
        out.row.verdict = kVerdictFail;
        std::ostringstream w;
        w << "eq#" << task.eq_index
          << ": transformed bytes match no replay and do not parse";
        out.warnings.push_back(w.str());
        return out;
    }
    std::vector<ExprPtr> before = equation_leaves(canonical(original.expr));
    std::vector<ExprPtr> after = equation_leaves(canonical(edited.expr));
    if (before.size() != after.size()) {
        out.row.verdict = kVerdictFail;
        std::ostringstream w;
        w << "eq#" << task.eq_index
          << ": transformed bytes match no replay and change the equation's row/operand shape";
        out.warnings.push_back(w.str());
        return out;
    }
    std::ostringstream w;
    w << "eq#" << task.eq_index
      << ": transformed bytes match no replay (hand edit?); verifying directly";
    out.warnings.push_back(w.str());
    for (std::size_t li = 0; li < before.size(); ++li) {
        VerificationReport vr = verify_equiv(before[li], after[li], std::nullopt, kVerifyTrials,
                                             kVerifyTolerance, verify_seed(seed, task.eq_index, li));
        fold_verdict(out.row.verdict, vr.verdict);
        out.row.trials += vr.trials_run;
        out.row.max_deviation = std::max(out.row.max_deviation, vr.max_deviation);
    }
    if (out.row.verdict.empty()) out.row.verdict = kVerdictPass;
    return out;
}

}  // namespace

CommandResult verify_content(std::string_view original, std::string_view transformed,
                             const std::string& original_name, const std::string& transformed_name,
                             bool serial) {
    ScanResult scan_o = scan(original);
    if (!scan_o.ok())
        return config_error(original_name + ": unbalanced math delimiter at byte " +
                            std::to_string(scan_o.error->offset));
    ScanResult scan_t = scan(transformed);
    if (!scan_t.ok())
        return config_error(transformed_name + ": unbalanced math delimiter at byte " +
                            std::to_string(scan_t.error->offset));

    MarkerScan marker_scan = detect_marker(transformed);
    if (!marker_scan.marker.present) {
        std::string detail = marker_scan.malformed
                                 ? "its first line looks like a marker but does not parse"
                                 : "it carries no marker line";
        return config_error(transformed_name + ": " + detail +
                            "; only documents produced by `run` can be verified");
    }

    std::vector<const Segment*> math_o, math_t;
    for (const Segment& s : scan_o.segments)
        if (s.kind == SegmentKind::Math) math_o.push_back(&s);
    for (const Segment& s : scan_t.segments)
        if (s.kind == SegmentKind::Math) math_t.push_back(&s);

    if (math_o.size() != math_t.size()) {
        CommandResult r;
        r.exit_code = kExitStructure;
        std::ostringstream msg;
        msg << "structural mismatch: " << original_name << " has " << math_o.size()
            << " math segments but " << transformed_name << " has " << math_t.size()
            << "; the files cannot be paired";
        r.error = msg.str();
        return r;
    }

    CommandResult result;
    RunReport& report = result.report;
    report.mode = ReportMode::Verify;
    report.input = original_name;
    report.output = transformed_name;
    report.seed = marker_scan.marker.seed;
    report.intensity = marker_scan.marker.intensity;
    report.trials = kVerifyTrials;
    report.tolerance = kVerifyTolerance;
    result.report_valid = true;

    std::vector<PairTask> tasks;
    tasks.reserve(math_o.size());
    for (std::size_t i = 0; i < math_o.size(); ++i)
        tasks.push_back({i, math_o[i]->inner, math_t[i]->inner});

    std::vector<EqOutcome> outcomes = map_tasks(tasks, serial, [&](const PairTask& task) {
        return process_pair(task, marker_scan.marker.seed, marker_scan.marker.intensity);
    });

    for (EqOutcome& oc : outcomes) {
        report.rows.push_back(oc.row);
        for (std::string& w : oc.warnings) report.warnings.push_back(std::move(w));
    }
    fold_row_totals(report);
    return result;
}

CommandResult verify_documents(const std::string& original_path,
                               const std::string& transformed_path, bool serial) {
    std::string original, transformed;
    if (auto err = read_file(original_path, original)) return config_error(*err);
    if (auto err = read_file(transformed_path, transformed)) return config_error(*err);
    return verify_content(original, transformed, original_path, transformed_path, serial);
}

// ============================================================================
// Rendering
// ============================================================================

namespace {

std::string plan_text(const std::vector<std::string>& plan) {
    std::string out = "[";
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (i) out += ",";
        out += plan[i];
    }
    out += "]";
    return out;
}

std::string num_text(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

}  // namespace

void render_text(const RunReport& report, std::ostream& out) {
    switch (report.mode) {
        case ReportMode::Run:
            out << "zero2hero run: input=" << report.input << " output="
                << (report.dry_run ? "(dry-run)" : report.output) << " seed=" << report.seed
                << " intensity=" << report.intensity << " trials=" << report.trials
                << " tol=" << num_text(report.tolerance) << "\n";
            for (const EquationRow& row : report.rows) {
                out << "eq#" << row.index << " parse=" << (row.parsed ? "ok" : "error")
                    << " plan=" << plan_text(row.plan) << " verify=" << row.verdict
                    << " trials=" << row.trials << " maxdev=" << num_text(row.max_deviation)
                    << "\n";
                if (row.parsed) out << score_row(row.index, row.before, row.after) << "\n";
            }
            for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
            out << "totals: equations=" << report.rows.size()
                << " transformed=" << report.transformed_count
                << " skipped=" << report.skipped_count << " before=" << report.total_before
                << " after=" << report.total_after << "\n";
            break;
        case ReportMode::Score:
            out << "zero2hero score: input=" << report.input << "\n";
            for (const EquationRow& row : report.rows) {
                if (row.parsed) {
                    const ComplexityScore& s = row.before;
                    out << "eq#" << row.index << " parse=ok nodes=" << s.node_count
                        << " greek=" << s.greek_count << " bigops=" << s.bigop_count
                        << " depth=" << s.max_depth << " diversity=" << s.op_diversity
                        << " total=" << s.total << "\n";
                } else {
                    out << "eq#" << row.index << " parse=error\n";
                }
            }
            for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
            out << "totals: equations=" << report.rows.size()
                << " scored=" << (report.rows.size() - static_cast<std::size_t>(report.skipped_count))
                << " total=" << report.total_before << "\n";
            break;
        case ReportMode::Verify:
            out << "zero2hero verify: original=" << report.input
                << " transformed=" << report.output << " seed=" << report.seed
                << " intensity=" << report.intensity << "\n";
            for (const EquationRow& row : report.rows) {
                out << "eq#" << row.index << " verify=" << row.verdict << " trials=" << row.trials
                    << " maxdev=" << num_text(row.max_deviation) << "\n";
            }
            for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
            out << "totals: pairs=" << report.rows.size() << " pass=" << report.pass_count
                << " fail=" << report.fail_count
                << " indeterminate=" << report.indeterminate_count << "\n";
            break;
    }
}

void render_machine(const RunReport& report, std::ostream& out) {
    using nlohmann::json;
    const char* mode = report.mode == ReportMode::Run      ? "run"
                       : report.mode == ReportMode::Score  ? "score"
                                                           : "verify";
    json header{{"type", "header"},       {"mode", mode},
                {"input", report.input},  {"output", report.output},
                {"seed", report.seed},    {"intensity", report.intensity},
                {"trials", report.trials},{"tolerance", report.tolerance},
                {"dry_run", report.dry_run}};
    out << header.dump() << "\n";
    for (const EquationRow& row : report.rows) {
        json j{{"type", "row"}, {"index", row.index}};
        switch (report.mode) {
            case ReportMode::Run:
                j["parse"] = row.parsed ? "ok" : "error";
                j["plan"] = row.plan;
                j["verdict"] = row.verdict;
                j["trials"] = row.trials;
                j["maxdev"] = row.max_deviation;
                j["before"] = row.before.total;
                j["after"] = row.after.total;
                j["greek_delta"] = row.after.greek_count - row.before.greek_count;
                j["bigop_delta"] = row.after.bigop_count - row.before.bigop_count;
                break;
            case ReportMode::Score:
                j["parse"] = row.parsed ? "ok" : "error";
                if (row.parsed) {
                    j["nodes"] = row.before.node_count;
                    j["greek"] = row.before.greek_count;
                    j["bigops"] = row.before.bigop_count;
                    j["depth"] = row.before.max_depth;
                    j["diversity"] = row.before.op_diversity;
                    j["total"] = row.before.total;
                }
                break;
            case ReportMode::Verify:
                j["verdict"] = row.verdict;
                j["trials"] = row.trials;
                j["maxdev"] = row.max_deviation;
                break;
        }
        out << j.dump() << "\n";
    }
    for (const std::string& w : report.warnings)
        out << json{{"type", "warning"}, {"text", w}}.dump() << "\n";
    json totals{{"type", "totals"}};
    switch (report.mode) {
        case ReportMode::Run:
            totals["equations"] = report.rows.size();
            totals["transformed"] = report.transformed_count;
            totals["skipped"] = report.skipped_count;
            totals["before"] = report.total_before;
            totals["after"] = report.total_after;
            break;
        case ReportMode::Score:
            totals["equations"] = report.rows.size();
            totals["scored"] = report.rows.size() - static_cast<std::size_t>(report.skipped_count);
            totals["total"] = report.total_before;
            break;
        case ReportMode::Verify:
            totals["pairs"] = report.rows.size();
            totals["pass"] = report.pass_count;
            totals["fail"] = report.fail_count;
            totals["indeterminate"] = report.indeterminate_count;
            break;
    }
    out << totals.dump() << "\n";
}

}  // namespace z2h
