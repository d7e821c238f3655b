#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace dedc {

// splitmix64 finalizer; used to mix stream labels into decorrelated sub-seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent sub-seed for (root seed, stream, index). Pure function,
// so any consumer can be re-run in isolation without replaying the whole run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
    return mix64(seed ^ mix64(stream ^ mix64(index)));
}

// Stream labels for derive_seed. Arbitrary distinct constants.
namespace stream {
inline constexpr std::uint64_t kSampleParams = 0x5A4D504C45ULL;   // per-scheme literal draws
inline constexpr std::uint64_t kDemoSelect = 0x44454D4FULL;       // per-sample demo selection
inline constexpr std::uint64_t kPrimitiveDemo = 0x5052494DULL;    // per-(sample, primitive) mini-demo
inline constexpr std::uint64_t kReorder = 0x524F5244ULL;          // topological reshuffles
}  // namespace stream

// Deterministic RNG with hand-pinned integer draws. std::mt19937_64 output is
// fully specified by the standard; std::uniform_int_distribution is not, so the
// uniform draw and the shuffle below are implemented here once and never change.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Exact uniform draw in [0, n) via rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t x = eng_();
            if (x >= threshold) return x % n;
        }
    }

    // Uniform draw in [lo, hi], inclusive.
    long long range(long long lo, long long hi) {
        if (hi < lo) throw std::invalid_argument("Rng::range: empty interval");
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace dedc
