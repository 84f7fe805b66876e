#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace acb::rng {

// 64-bit finalizer (splitmix64 output function).
std::uint64_t mix64(std::uint64_t x);

std::uint64_t hash64(std::uint64_t a, std::uint64_t b);

// Replicate seed derivation used by every experiment driver:
//   seed_rep = hash64(hash64(mix64(master) ^ fnv1a(experiment)), replicate)
// The rule is part of the output contract and must not change between
// versions.
std::uint64_t derive_seed(std::uint64_t master, std::string_view experiment, std::uint64_t replicate);

std::uint64_t fnv1a(std::string_view text);

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

// Counter-based uniform stream: value k depends only on (seed, k).
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : seed_(seed) {}

    // Uniform on the open interval (0, 1) with 53 random bits.
    double at(std::uint64_t counter) const;

    double between(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * at(counter);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

// Counter-based standard normal stream. Counters 2p and 2p+1 share one
// Philox block and are the cosine/sine halves of a Box-Muller pair, so the
// value at a counter is independent of evaluation order.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : seed_(seed) {}

    double at(std::uint64_t counter) const;

    // out[k] = at(first + k)
    void fill(std::uint64_t first, std::span<double> out) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

}  // namespace acb::rng
