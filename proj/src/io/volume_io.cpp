#include "dyntex/io/volume_io.hpp"

#include <bit>
#include <cstring>

namespace dyntex::io {

static_assert(std::endian::native == std::endian::little, "volume blobs are written in host byte order");

fs::path raw_path_for(const fs::path& header) {
  fs::path raw = header;
  raw.replace_extension(".raw");
  return raw;
}

void write_volume(const fs::path& header, const Volume& vol) {
  const Dims3& d = vol.shape();
  Json h;
  h["shape"] = {d[0], d[1], d[2]};
  h["spacing_mm"] = {vol.spacing_mm[0], vol.spacing_mm[1], vol.spacing_mm[2]};
  h["phase"] = std::string(phase_name(vol.phase));
  h["dtype"] = "f32";
  std::vector<char> bytes(vol.voxels.data.size() * sizeof(float));
  std::memcpy(bytes.data(), vol.voxels.data.data(), bytes.size());
  write_bytes(raw_path_for(header), bytes);
  write_json(header, h);
}

Volume read_volume(const fs::path& header) {
  const Json h = read_json(header);
  const std::string where = header.string();
  const auto shape = get_field<std::vector<std::size_t>>(h, "shape", where);
  const auto spacing = get_field<std::vector<double>>(h, "spacing_mm", where);
  const auto phase = get_field<std::string>(h, "phase", where);
  const auto dtype = get_field<std::string>(h, "dtype", where);
  if (shape.size() != 3 || shape[0] == 0 || shape[1] == 0 || shape[2] == 0)
    throw IoError(where + ": shape must be three positive extents");
  if (spacing.size() != 3 || !(spacing[0] > 0 && spacing[1] > 0 && spacing[2] > 0))
    throw IoError(where + ": spacing_mm must be three positive values");
  if (dtype != "f32") throw IoError(where + ": unsupported dtype '" + dtype + "'");
  const auto ph = parse_phase(phase);
  if (!ph) throw IoError(where + ": unknown phase '" + phase + "'");

  Volume vol({shape[0], shape[1], shape[2]}, {spacing[0], spacing[1], spacing[2]}, *ph);
  const std::vector<char> bytes = read_bytes(raw_path_for(header));
  if (bytes.size() != vol.voxels.data.size() * sizeof(float)) {
    throw IoError(raw_path_for(header).string() + ": " + std::to_string(bytes.size()) + " bytes, expected " +
                  std::to_string(vol.voxels.data.size() * sizeof(float)));
  }
  std::memcpy(vol.voxels.data.data(), bytes.data(), bytes.size());
  return vol;
}

}  // namespace dyntex::io
