#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyntex/detect/box.hpp"

namespace dyntex::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

/// Malformed or missing input files. The message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json read_json(const fs::path& path);
/// Two-space indented, trailing newline; written to a temporary and renamed.
void write_json(const fs::path& path, const Json& doc);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

std::vector<char> read_bytes(const fs::path& path);
void write_bytes(const fs::path& path, const std::vector<char>& bytes);

Json box_to_json(const detect::Box3D& b);
detect::Box3D box_from_json(const Json& j);

/// Typed member access with an IoError naming the key and the document.
template <typename T>
T get_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw IoError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(where + ": field '" + key + "': " + e.what());
  }
}

}  // namespace dyntex::io
