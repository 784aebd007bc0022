#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ghof/common.hpp"

namespace ghof {

using Json = nlohmann::json;

// Empty path yields an empty object. The file must contain a JSON object.
Json load_config_file(const std::string& path);

// Throws listing the first key not in `known`.
void reject_unknown_keys(const Json& config, const std::vector<std::string>& known,
                         const std::string& context);

double jget(const Json& j, const char* key, double def);
std::int64_t jget(const Json& j, const char* key, std::int64_t def);
int jget(const Json& j, const char* key, int def);
std::uint64_t jget(const Json& j, const char* key, std::uint64_t def);
std::string jget(const Json& j, const char* key, const std::string& def);
bool jget(const Json& j, const char* key, bool def);
std::vector<int> jget(const Json& j, const char* key, const std::vector<int>& def);

// config["out"] if set, else $GHOF_OUT_ROOT/<command> (default root "runs").
// Creates the directory.
std::string resolve_out_dir(const Json& config, const std::string& command);

// Serialized effective config; written as config.json into each output dir
// and hashed (FNV-1a) into reports.
std::string config_echo(const Json& effective);
std::string config_hash_hex(const Json& effective);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ghof
