#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>

namespace dockette {

/// Coordinates of one value in the counter-based random stream.
///
/// Every random draw in a docking run is addressed by this tuple instead of
/// being pulled from a stateful generator, so the value a worker sees does
/// not depend on which worker computes it or in which order.
struct RngKey {
    std::uint64_t seed = 0;
    std::uint32_t run = 0;
    std::uint32_t generation = 0;
    std::uint32_t unit = 0;
    std::uint32_t draw = 0;

    friend constexpr bool operator==(const RngKey&, const RngKey&) = default;
};

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// splitmix64 output finalizer (a bijection on 64-bit words).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Full 64-bit state for a key.
///
/// Round one folds (run, generation) into the seed, round two folds
/// (unit, draw). Each round is a bijection in its packed word for a fixed
/// input, so keys differing only in `draw` never collide.
constexpr std::uint64_t rng_bits(const RngKey& key) noexcept {
    const std::uint64_t outer = (std::uint64_t{key.run} << 32) | key.generation;
    const std::uint64_t inner = (std::uint64_t{key.unit} << 32) | key.draw;
    const std::uint64_t h = splitmix64_mix(key.seed + kGoldenGamma * (outer + 1));
    return splitmix64_mix(h + kGoldenGamma * (inner + 1));
}

/// Uniform real in [0, 1) from the top 53 bits of the key's state.
constexpr double rng_uniform(const RngKey& key) noexcept {
    return static_cast<double>(rng_bits(key) >> 11) * 0x1.0p-53;
}

/// Sequential cursor over the `draw` counter of a fixed key prefix.
class Draws {
public:
    constexpr explicit Draws(RngKey key) noexcept : key_(key) {}

    constexpr double uniform() noexcept {
        const double u = rng_uniform(key_);
        ++key_.draw;
        return u;
    }

    /// Uniform integer in [0, n); n must be positive.
    constexpr std::size_t below(std::size_t n) noexcept {
        const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return std::min(i, n - 1);
    }

    constexpr const RngKey& key() const noexcept { return key_; }

private:
    RngKey key_;
};

/// Namespaces for the `unit` field so independent consumers in the same
/// generation never share a stream.
enum class StreamTag : std::uint32_t {
    Init = 1,
    Breed = 2,
    LocalSearchSample = 3,
    LocalSearch = 4,
};

constexpr std::uint32_t stream_unit(StreamTag tag, std::uint32_t index) noexcept {
    return (static_cast<std::uint32_t>(tag) << 24) | (index & 0x00FFFFFFu);
}

} // namespace dockette
