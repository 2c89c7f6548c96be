#include "dyntex/io/json_util.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

namespace dyntex::io {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<char>& bytes) {
  write_text(path, std::string(bytes.begin(), bytes.end()));
}

Json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

Json box_to_json(const detect::Box3D& b) { return Json::array({b.x1, b.y1, b.z1, b.x2, b.y2, b.z2}); }

detect::Box3D box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 6) throw IoError("box: expected [x1,y1,z1,x2,y2,z2], got " + j.dump());
  for (const auto& v : j)
    if (!v.is_number()) throw IoError("box: non-numeric coordinate in " + j.dump());
  detect::Box3D b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                  j[3].get<double>(), j[4].get<double>(), j[5].get<double>()};
  if (!b.valid()) throw IoError("box: empty or inverted box " + j.dump());
  return b;
}

}  // namespace dyntex::io
