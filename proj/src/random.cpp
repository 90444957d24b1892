#include "ecb/random.hpp"

#include "ecb/error.hpp"

namespace ecb {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::EntryOutOfRange: return "EntryOutOfRange";
    case ErrorCode::DiagonalNotMaximal: return "DiagonalNotMaximal";
    case ErrorCode::RowsUnordered: return "RowsUnordered";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ArmHasNoContext: return "ArmHasNoContext";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::HorizonMismatch: return "HorizonMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t domain, std::initializer_list<std::uint64_t> key)
{
    std::uint64_t state = seed;
    std::uint64_t h = splitmix64(state);
    auto absorb = [&](std::uint64_t v) {
        state = h ^ v;
        h = splitmix64(state);
    };
    absorb(domain);
    absorb(key.size());
    for (auto v : key) {
        absorb(v);
    }
    return h;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

RandomStream::RandomStream(std::uint64_t seed, StreamDomain domain, std::initializer_list<std::uint64_t> key)
    : RandomStream(mix_key(seed, static_cast<std::uint64_t>(domain), key))
{
}

double RandomStream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t RandomStream::index(std::size_t count)
{
    auto k = static_cast<std::size_t>(uniform() * static_cast<double>(count));
    return k < count ? k : count - 1;
}

}  // namespace ecb
