#include "curirl/error.hpp"
#include "curirl/rng.hpp"

namespace curirl {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::degenerate_input: return "degenerate input";
    case ErrorKind::unsupported_dimension: return "unsupported dimension";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::empty_input: return "empty input";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::missing_score: return "missing score";
    case ErrorKind::length_mismatch: return "length mismatch";
    case ErrorKind::consistency: return "consistency error";
    case ErrorKind::contract: return "contract violation";
    case ErrorKind::numeric: return "numeric error";
    }
    return "error";
}

std::size_t Rng::index(std::size_t n) {
    const std::uint64_t bound = n;
    // Largest multiple of n representable; draws above it are rejected.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return static_cast<std::size_t>(draw % bound);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace curirl
