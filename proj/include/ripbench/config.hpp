#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace ripbench {

using Json = nlohmann::ordered_json;

// Every recognised key with its default value; a config file only needs the keys it changes.
Json default_config();

// Recursively overlays `patch` onto `base`. Unknown keys are rejected so typos fail loudly.
void merge_config(Json& base, const Json& patch, const std::string& path = "");

Json load_config_file(const std::string& path);

// Master seed precedence: explicit flag, then the config file, then RIPBENCH_SEED, then 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const Json& file_config);

// Digest over the settings that determine results; output paths, mode, listener
// address and sweep thread count are left out.
std::string config_digest(const Json& cfg);

}  // namespace ripbench
