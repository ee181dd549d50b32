#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace plap::io {

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

nlohmann::json read_json(const std::filesystem::path& path);

/// Shortest round-trip decimal representation ("nan"/"inf" for non-finite).
std::string format_double(double v);

} // namespace plap::io
