#pragma once

#include <filesystem>
#include <json.hpp>

#include "psd/group.hpp"

namespace psd {

// JSON <-> ModelSpec. Parsing rejects unknown fields and reports the location
// of the first problem through ModelError.
ModelSpec parse_model_spec(const nlohmann::json& j);
nlohmann::json to_json(const ModelSpec& spec);

// Reads and parses a model file; load_model also validates it.
ModelSpec load_model_spec(const std::filesystem::path& path);
ModelPtr load_model(const std::filesystem::path& path);

}  // namespace psd
