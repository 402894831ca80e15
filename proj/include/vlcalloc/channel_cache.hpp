#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "vlcalloc/channel.hpp"
#include "vlcalloc/scene.hpp"

namespace vlcalloc {

inline constexpr int kChannelCacheVersion = 1;

/// SHA-256 (hex) of the canonical scenario document and trace parameters.
std::string channel_content_hash(const ScenarioConfig& config, const TraceParams& params);

/// Versioned JSON document; layout in docs/formats.md. Impulse responses are
/// not persisted.
std::string serialize_channel_matrix(const ChannelMatrix& matrix);
ChannelMatrix parse_channel_matrix(const std::string& text);

void save_channel_matrix(const ChannelMatrix& matrix, const std::filesystem::path& path);
ChannelMatrix load_channel_matrix(const std::filesystem::path& path);

/// The cached matrix when `path` exists, parses, and carries `expected_hash`.
std::optional<ChannelMatrix> load_cached_channel(const std::filesystem::path& path, const std::string& expected_hash);

}  // namespace vlcalloc
