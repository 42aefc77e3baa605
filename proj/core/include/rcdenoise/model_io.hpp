#pragma once

#include <filesystem>
#include <string>

#include "rcdenoise/reservoir.hpp"

namespace rcdenoise {

inline constexpr int kModelSchemaVersion = 1;

[[nodiscard]] std::string model_to_json(const EchoStateNetwork& esn);
/// Throws Parse (with byte offset) on malformed text and SchemaVersion on an
/// unknown schema; nothing is returned in either case.
[[nodiscard]] EchoStateNetwork model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const EchoStateNetwork& esn);
[[nodiscard]] EchoStateNetwork load_model(const std::filesystem::path& path);

}  // namespace rcdenoise
