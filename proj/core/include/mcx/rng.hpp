#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace mcx {

/// Counter-based generator: output i is a fixed 64-bit mix of (key, counter),
/// so streams can be split by key and sampled at any index without state.
/// Bit-exact across platforms.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))), counter_(0) {}

    /// Child generator with an independent stream; used for chunked parallel
    /// sampling seeded by (master seed, chunk index).
    CounterRng split(std::uint64_t stream) const { return CounterRng(key_, stream + 1); }

    std::uint64_t next_u64() {
        std::uint64_t x = key_ + 0x9e3779b97f4a7c15ull * ++counter_;
        return mix(mix(x) ^ key_);
    }

    /// Uniform on [0, 1).
    double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        // Multiply-shift; bias is negligible for the small n used here.
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Random sign, +1 or -1.
    int rademacher() { return (next_u64() & 1) ? 1 : -1; }

    /// Uniformly random permutation of {0..n-1}, Fisher-Yates descending.
    std::vector<int> permutation(int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (int i = n - 1; i >= 1; --i) {
            int j = static_cast<int>(uniform_below(static_cast<std::uint64_t>(i) + 1));
            std::swap(p[i], p[j]);
        }
        return p;
    }

    /// Standard normal via Box-Muller (test fuzzing only; not on any
    /// reproducibility-critical path).
    double normal() {
        double u1 = uniform01(), u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 33;
        z *= 0xff51afd7ed558ccdull;
        z ^= z >> 33;
        z *= 0xc4ceb9fe1a85ec53ull;
        z ^= z >> 33;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace mcx
