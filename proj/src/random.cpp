#include "acb/random.hpp"

#include <cmath>
#include <numbers>

namespace acb::rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

std::array<std::uint32_t, 2> split(std::uint64_t v) {
    return {static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(v >> 32)};
}

double open_unit(std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * kTwoPow53Inv;
}

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t index, std::uint32_t tag) {
    const auto c = split(index);
    return philox4x32({c[0], c[1], tag, 0u}, split(seed));
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t hash64(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ (b * 0xC2B2AE3D27D4EB4Full + 0x165667B19E3779F9ull));
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view experiment, std::uint64_t replicate) {
    return hash64(hash64(mix64(master) ^ fnv1a(experiment), 0), replicate);
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

double UniformStream::at(std::uint64_t counter) const {
    const auto b = block(seed_, counter, 0x756E6966u);
    return open_unit(b[0], b[1]);
}

double NormalStream::at(std::uint64_t counter) const {
    const auto b = block(seed_, counter >> 1, 0x6E6F726Du);
    const double radius = std::sqrt(-2.0 * std::log(open_unit(b[0], b[1])));
    const double angle = 2.0 * std::numbers::pi * open_unit(b[2], b[3]);
    return (counter & 1u) ? radius * std::sin(angle) : radius * std::cos(angle);
}

void NormalStream::fill(std::uint64_t first, std::span<double> out) const {
    std::size_t k = 0;
    std::uint64_t counter = first;
    if (!out.empty() && (counter & 1u)) {
        out[k++] = at(counter++);
    }
    for (; k + 1 < out.size(); k += 2, counter += 2) {
        const auto b = block(seed_, counter >> 1, 0x6E6F726Du);
        const double radius = std::sqrt(-2.0 * std::log(open_unit(b[0], b[1])));
        const double angle = 2.0 * std::numbers::pi * open_unit(b[2], b[3]);
        out[k] = radius * std::cos(angle);
        out[k + 1] = radius * std::sin(angle);
    }
    if (k < out.size()) {
        out[k] = at(counter);
    }
}

}  // namespace acb::rng
