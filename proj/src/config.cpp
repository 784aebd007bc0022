#include "ghof/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace ghof {

Json load_config_file(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream f(path);
  if (!f) throw validation_error("cannot open config file " + path);
  Json j;
  try {
    f >> j;
  } catch (const Json::parse_error& e) {
    throw validation_error("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw validation_error("config file must hold a JSON object");
  return j;
}

void reject_unknown_keys(const Json& config, const std::vector<std::string>& known,
                         const std::string& context) {
  for (const auto& [key, value] : config.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw validation_error("unknown " + context + " config key: '" + key + "'");
  }
}

namespace {

template <typename T>
T jget_impl(const Json& j, const char* key, const T& def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw validation_error(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

double jget(const Json& j, const char* key, double def) { return jget_impl(j, key, def); }
std::int64_t jget(const Json& j, const char* key, std::int64_t def) {
  return jget_impl(j, key, def);
}
int jget(const Json& j, const char* key, int def) { return jget_impl(j, key, def); }
std::uint64_t jget(const Json& j, const char* key, std::uint64_t def) {
  return jget_impl(j, key, def);
}
std::string jget(const Json& j, const char* key, const std::string& def) {
  return jget_impl(j, key, def);
}
bool jget(const Json& j, const char* key, bool def) { return jget_impl(j, key, def); }
std::vector<int> jget(const Json& j, const char* key, const std::vector<int>& def) {
  return jget_impl(j, key, def);
}

std::string resolve_out_dir(const Json& config, const std::string& command) {
  std::string dir = jget(config, "out", std::string());
  if (dir.empty()) {
    const char* root = std::getenv("GHOF_OUT_ROOT");
    dir = (root && *root ? std::string(root) : std::string("runs")) + "/" + command;
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw validation_error("cannot create output dir " + dir + ": " + ec.message());
  return dir;
}

std::string config_echo(const Json& effective) { return effective.dump(2) + "\n"; }

std::string config_hash_hex(const Json& effective) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(effective.dump())));
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw validation_error("cannot write " + path);
  f << content;
  if (!f) throw validation_error("write failed: " + path);
}

}  // namespace ghof
