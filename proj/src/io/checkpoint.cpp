#include "dyntex/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <set>

namespace dyntex::io {

static_assert(std::endian::native == std::endian::little, "checkpoint blobs are written in host byte order");

const Tensor64& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return t;
  throw IoError("checkpoint (" + kind + ") has no tensor '" + name + "'");
}

void save_checkpoint(const fs::path& dir, const Checkpoint& ck) {
  fs::create_directories(dir);
  Json h;
  h["format_version"] = kCheckpointFormat;
  h["kind"] = ck.kind;
  h["config"] = ck.config;
  Json list = Json::array();
  std::set<std::string> seen;
  for (const auto& [name, t] : ck.tensors) {
    if (!seen.insert(name).second) throw std::invalid_argument("checkpoint: duplicate tensor name " + name);
    const std::string file = name + ".f32";
    list.push_back({{"name", name}, {"shape", t.shape()}, {"file", file}});
    std::vector<char> bytes(t.size() * sizeof(float));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const float f = static_cast<float>(t[i]);
      std::memcpy(bytes.data() + i * sizeof(float), &f, sizeof(float));
    }
    write_bytes(dir / file, bytes);
  }
  h["tensors"] = list;
  write_json(dir / "header.json", h);
}

Checkpoint load_checkpoint(const fs::path& dir) {
  const Json h = read_json(dir / "header.json");
  const std::string where = (dir / "header.json").string();
  const int version = get_field<int>(h, "format_version", where);
  if (version != kCheckpointFormat) throw IoError(where + ": unsupported format_version " + std::to_string(version));
  Checkpoint ck;
  ck.kind = get_field<std::string>(h, "kind", where);
  ck.config = get_field<Json>(h, "config", where);
  for (const auto& e : get_field<Json>(h, "tensors", where)) {
    const auto name = get_field<std::string>(e, "name", where);
    const auto shape = get_field<Shape>(e, "shape", where);
    const auto file = get_field<std::string>(e, "file", where);
    const std::vector<char> bytes = read_bytes(dir / file);
    const std::size_t n = shape_product(shape);
    if (bytes.size() != n * sizeof(float)) {
      throw IoError(where + ": tensor '" + name + "' has shape " + shape_string(shape) + " but " +
                    std::to_string(bytes.size()) + " bytes");
    }
    Tensor64 t(shape);
    for (std::size_t i = 0; i < n; ++i) {
      float f;
      std::memcpy(&f, bytes.data() + i * sizeof(float), sizeof(float));
      t[i] = f;
    }
    ck.tensors.emplace_back(name, std::move(t));
  }
  return ck;
}

}  // namespace dyntex::io
