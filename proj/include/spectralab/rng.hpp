#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace spectralab::rng {

/// SplitMix64 step: advances the state by the golden-gamma increment and
/// returns a scrambled output word.  This is the fixed-increment generator
/// of Steele/Lea/Flood as published by Vigna; the constants below are the
/// reference ones, so streams are reproducible across implementations and
/// languages.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// One independent output stream of the counter-based generator.
class Stream {
public:
    explicit Stream(std::uint64_t key) : state_(key) {}

    std::uint64_t next() { return splitmix64(state_); }

    /// Uniform draw from {0, 1, ..., bound-1} by rejection sampling, so the
    /// result depends only on the stream contents and not on platform
    /// arithmetic quirks.  bound must be nonzero.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
        for (;;) {
            std::uint64_t x = next();
            if (x >= threshold) return x % bound;
        }
    }

    /// Uniform sign in {-1, +1} from the top bit.
    int next_sign() { return (next() >> 63) ? -1 : +1; }

private:
    std::uint64_t state_;
};

/// Substream domains.  Each (seed, domain, index) triple keys one stream;
/// the derivation below is the documented cross-language contract.
enum class Domain : std::uint64_t {
    Permutation = 1, // one substream per base edge (i, j), index = i*c + j
    Negation = 2,    // one substream per constraint vertex f, index = j*n + b
    Experiment = 3,  // driver-level draws (t-sampling etc.)
};

/// Derive a substream key: three chained SplitMix64 scrambles of
/// seed, domain and index.  Documented so other implementations can
/// reproduce instances bit for bit.
inline Stream substream(std::uint64_t seed, Domain domain, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t k = splitmix64(s);
    s = k ^ static_cast<std::uint64_t>(domain);
    k = splitmix64(s);
    s = k ^ index;
    k = splitmix64(s);
    return Stream(k);
}

/// Uniform permutation of {0, ..., n-1} by an inside-out Fisher-Yates on the
/// given stream: for i = 1..n-1, swap position i with next_below(i+1).
inline std::vector<int> random_permutation(int n, Stream& stream) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (int i = 1; i < n; ++i) {
        const auto j = static_cast<int>(stream.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(p[i], p[j]);
    }
    return p;
}

} // namespace spectralab::rng
