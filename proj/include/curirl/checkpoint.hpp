#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "curirl/network.hpp"

namespace curirl {

inline constexpr int checkpoint_format_version = 1;

struct Checkpoint {
    PolicyModel model;
    std::uint64_t seed = 0;
};

/// Plain-text `key = value...` document: format version, seed, action count,
/// input normalization, then each block's shape and row-major values, all
/// numbers written with 17 significant digits.
void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Rejects unknown versions, shape mismatches, and non-finite values (contract/parse errors).
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace curirl
