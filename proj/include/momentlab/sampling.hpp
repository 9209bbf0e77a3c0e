#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace momentlab {

// splitmix64 finalizer; used to derive independent per-batch seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Vose's alias method: O(n) setup, O(1) draws from a finite distribution.
class AliasTable {
public:
    explicit AliasTable(std::span<const double> weights);

    std::size_t sample(std::mt19937_64& rng) const;
    std::size_t size() const noexcept { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

} // namespace momentlab
