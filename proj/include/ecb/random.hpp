#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ecb {

/// Stream identifiers used to split a master seed. The first component of
/// every key names the consumer so unrelated consumers never share a stream.
enum class StreamDomain : std::uint64_t {
    Simulation = 0,   // (policy kind, replication)
    Matrix = 1,       // (refresh block)
    InitialState = 2, // (replication)
    MeanField = 3,    // (run)
};

/// Seedable source of uniform variates in [0, 1).
///
/// A stream is identified by a master seed plus a key of integers; the key is
/// hashed with SplitMix64 into the engine seed, so any stream can be built
/// directly from its coordinates without touching any other stream.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);
    RandomStream(std::uint64_t seed, StreamDomain domain, std::initializer_list<std::uint64_t> key);

    /// One uniform variate with 53 random bits.
    double uniform();

    /// floor(uniform() * count), clamped to count - 1. Consumes one variate.
    std::size_t index(std::size_t count);

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

}  // namespace ecb
