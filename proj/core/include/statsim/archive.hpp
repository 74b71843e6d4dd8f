#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "statsim/mlp.hpp"

namespace statsim {

inline constexpr int kArchiveVersion = 1;

struct ArchiveMeta {
    std::uint64_t seed = 0;
    std::string config_digest;
    bool symmetrize = true;
};

struct LoadedModel {
    Mlp net;
    ArchiveMeta meta;
};

/// JSON document: format tag, version, layer sizes, per-layer weight/bias arrays as
/// round-trip decimals, metadata, and an FNV-1a digest of the parameter bit patterns.
void save_model(const Mlp& net, const std::filesystem::path& path, const ArchiveMeta& meta = {});

/// Throws ArchiveError on unreadable/truncated files, version or digest mismatch.
LoadedModel load_model(const std::filesystem::path& path);

/// Hex digest over layer sizes and the bit patterns of every weight and bias.
std::string parameter_digest(const Mlp& net);

}  // namespace statsim
