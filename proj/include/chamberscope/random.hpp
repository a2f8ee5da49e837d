// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace chamberscope {

/// SplitMix64. Small state, so one generator per replicate is cheap; used
/// for counter-derived substreams.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Seed of substream `index` under a master seed; independent of how
/// replicates are scheduled.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    SplitMix64 mixer(seed ^ (index * 0xD1B54A32D192ED03ULL));
    mixer();
    return mixer();
}

/// Uniform integer in [0, bound). Rejection sampling, so results do not
/// depend on the standard library's distribution implementation.
template <typename Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = static_cast<std::uint64_t>(gen());
    } while (x >= limit);
    return x % bound;
}

/// Uniform double in [0, 1) from the top 53 bits.
template <typename Gen>
double uniform_unit(Gen& gen) {
    return static_cast<double>(static_cast<std::uint64_t>(gen()) >> 11) * 0x1.0p-53;
}

/// Fisher-Yates shuffle.
template <typename T, typename Gen>
void shuffle(std::span<T> items, Gen& gen) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(gen, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace chamberscope
