#ifndef METCHANGE_RNG_HPP
#define METCHANGE_RNG_HPP

#include <cstdint>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

namespace metchange {

// Counter-based seeding: every consumer of randomness gets its own stream,
// derived from the root seed by mixing in a label and/or an index. Streams
// never depend on how many draws another consumer made.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a; only used to turn consumer labels into integers.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
    return derive_seed(seed, hash_label(label));
}

// SplitMix64 as a UniformRandomBitGenerator. Small state, so one generator
// per sample is cheap.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

// Uniform integer in [0, bound). Rejection sampling, so results are identical
// on every standard library (std::uniform_int_distribution is not).
template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

template <class T, class Rng>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = uniform_below(rng, i);
        std::swap(items[i - 1], items[j]);
    }
}

// First `count` slots of `pool` become a uniform sample without replacement.
template <class T, class Rng>
void partial_shuffle(std::vector<T>& pool, std::size_t count, Rng& rng) {
    for (std::size_t i = 0; i < count && i + 1 < pool.size(); ++i) {
        std::size_t j = i + uniform_below(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
}

} // namespace metchange

#endif
