// zero2hero.cpp - Command-line front end for the equation complicator

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zero2hero/pipeline.hpp"

namespace {

// --seed wins; the ZERO2HERO_SEED environment variable is the fallback; the
// content hash default applies only when neither is present.  A malformed
// environment value is a loud configuration error, not a silent fallback,
// so reproducibility never degrades unnoticed.
int apply_env_seed(z2h::RunConfig& config) {
    if (config.seed) return z2h::kExitOk;
    const char* env = std::getenv("ZERO2HERO_SEED");
    if (!env || !*env) return z2h::kExitOk;
    std::uint64_t value = 0;
    const char* end = env + std::string_view(env).size();
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc{} || ptr != end) {
        std::cerr << "zero2hero: ZERO2HERO_SEED is not an unsigned integer: " << env << "\n";
        return z2h::kExitConfig;
    }
    config.seed = value;
    return z2h::kExitOk;
}

int finish(const z2h::CommandResult& result, const std::string& format) {
    if (result.report_valid) {
        if (format == "machine")
            z2h::render_machine(result.report, std::cout);
        else
            z2h::render_text(result.report, std::cout);
    }
    if (!result.error.empty()) std::cerr << "zero2hero: " << result.error << "\n";
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero2hero: rewrite every equation in a LaTeX document into a "
                 "complicated-looking but value-equivalent form"};
    app.require_subcommand(1);

    // --- run ----------------------------------------------------------------
    z2h::RunConfig config;
    std::string format = "text";
    CLI::App* run = app.add_subcommand("run", "Transform a document and write the result");
    run->add_option("--input", config.input, "Input LaTeX file")->required();
    run->add_option("--output", config.output, "Output LaTeX file");
    run->add_option("--seed", config.seed,
                    "RNG seed (default: ZERO2HERO_SEED, then input content hash)");
    run->add_option("--intensity", config.intensity, "Passes applied per equation, 0..5");
    run->add_option("--passes", config.passes, "Comma-separated allow-list of pass ids")
        ->delimiter(',');
    run->add_flag("--force", config.force, "Transform even if the input carries a marker");
    run->add_flag("--dry-run", config.dry_run, "Report only; write no file");
    run->add_option("--trials", config.verify_trials, "Verification trials per equation");
    run->add_option("--tol", config.tolerance, "Relative tolerance for verification");
    run->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"text", "machine"}));

    // --- score --------------------------------------------------------------
    std::string score_input;
    CLI::App* score = app.add_subcommand("score", "Score every equation without transforming");
    score->add_option("--input", score_input, "Input LaTeX file")->required();

    // --- verify -------------------------------------------------------------
    std::string verify_original, verify_transformed;
    CLI::App* verify = app.add_subcommand("verify", "Audit a prior run's output");
    verify->add_option("--original", verify_original, "Document the run read")->required();
    verify->add_option("--transformed", verify_transformed, "Document the run wrote")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? z2h::kExitOk : z2h::kExitConfig;
    }

    if (run->parsed()) {
        if (int code = apply_env_seed(config); code != z2h::kExitOk) return code;
        return finish(z2h::run_document(config), format);
    }
    if (score->parsed()) return finish(z2h::score_document(score_input), "text");
    return finish(z2h::verify_documents(verify_original, verify_transformed), "text");
}
