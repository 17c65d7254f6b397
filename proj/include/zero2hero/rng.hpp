// rng.hpp - deterministic seeded random streams
//
// Every random decision in the tool draws from a named substream derived
// from (master seed, equation index, purpose tag, counter).  Substreams
// make per-equation work order-independent: a thread transforming equation
// 7 sees exactly the bytes a sequential run would produce, because nothing
// it draws depends on how many values other equations consumed.  The
// generator is splitmix64 — tiny, portable, and identical on every
// platform, unlike the std:: distributions, which are free to differ
// between standard library implementations.

#pragma once

#include <cmath>
#include <cstdint>

namespace z2h {

// splitmix64 finalizer: bijective 64-bit scrambler with full avalanche.
inline constexpr std::uint64_t mix_u64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Purpose tags keeping unrelated decision streams apart.  Values are
// arbitrary but frozen: changing one changes every produced document.
enum : std::uint64_t {
    kStreamPlan = 0x706C616E,   // pass selection per equation
    kStreamApply = 0x6170706C,  // per-step randomness inside a pass
    kStreamTrial = 0x7472696C,  // verification trial assignments
    kStreamGen = 0x67656E,      // test-side expression/document generators
};

class Rng {
public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    // Independent stream addressed by up to three labels.
    static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
        std::uint64_t s = mix_u64(seed);
        s = mix_u64(s ^ a);
        s = mix_u64(s ^ b);
        s = mix_u64(s ^ c);
        return Rng(s);
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n); n > 0.  The modulo bias is far below
    // anything these streams are used for.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    // Uniform in [lo, hi).
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

    // True with probability num/den.
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

private:
    std::uint64_t state_;
};

}  // namespace z2h
