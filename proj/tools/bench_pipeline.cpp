// bench_pipeline.cpp - Serial vs parallel equation-loop benchmark

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zero2hero/pipeline.hpp"

#if defined(Z2H_HAVE_OPENMP)
#include <omp.h>
#endif

namespace {

// A synthetic document: prose interleaved with equations cycling through a
// few shapes so every pass gets exercised.
std::string synth_document(int equations) {
    static const char* kBodies[] = {
        "x + y",
        "E = mc^2",
        "\\frac{a}{b} + \\frac{c}{d}",
        "\\sum_{k=1}^{n} k x_k",
        "\\alpha \\beta + \\gamma",
        "\\sin x + \\cos y",
    };
    std::string doc = "Benchmark corpus.\n";
    for (int i = 0; i < equations; ++i) {
        doc += "Paragraph ";
        doc += std::to_string(i);
        doc += " discusses $";
        doc += kBodies[i % (sizeof(kBodies) / sizeof(kBodies[0]))];
        doc += "$ at length.\n";
    }
    return doc;
}

double run_timed(const std::string& doc, const z2h::RunConfig& config, int repeat,
                 std::string& out_bytes) {
    using clock = std::chrono::steady_clock;
    double best = 1e300;
    for (int i = 0; i < repeat; ++i) {
        auto t0 = clock::now();
        z2h::CommandResult r = z2h::run_on_content(doc, config);
        auto t1 = clock::now();
        if (r.exit_code != z2h::kExitOk) {
            std::fprintf(stderr, "bench run failed with exit %d: %s\n", r.exit_code,
                         r.error.c_str());
            std::exit(1);
        }
        out_bytes = std::move(r.output_bytes);
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bench_pipeline: compare the serial and parallel equation loops"};
    int equations = 200;
    int intensity = 3;
    int repeat = 3;
    std::uint64_t seed = 7;
    app.add_option("--equations", equations, "Number of equations in the synthetic document");
    app.add_option("--intensity", intensity, "Passes per equation");
    app.add_option("--repeat", repeat, "Timed repetitions (best-of)");
    app.add_option("--seed", seed, "RNG seed");
    CLI11_PARSE(app, argc, argv);

    std::string doc = synth_document(equations);
    z2h::RunConfig config;
    config.input = "bench.tex";
    config.dry_run = true;
    config.seed = seed;
    config.intensity = intensity;

    z2h::RunConfig serial = config;
    serial.serial = true;

    std::string serial_bytes, parallel_bytes;
    double t_serial = run_timed(doc, serial, repeat, serial_bytes);
    double t_parallel = run_timed(doc, config, repeat, parallel_bytes);

    if (serial_bytes != parallel_bytes) {
        std::fprintf(stderr, "FAIL: serial and parallel outputs differ\n");
        return 1;
    }

#if defined(Z2H_HAVE_OPENMP)
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("equations=%d intensity=%d repeat=%d threads=%d\n", equations, intensity, repeat,
                threads);
    std::printf("serial:   %.4f s\n", t_serial);
    std::printf("parallel: %.4f s\n", t_parallel);
    std::printf("speedup:  %.2fx\n", t_serial / t_parallel);
    std::printf("outputs byte-identical: yes\n");
    return 0;
}
