#pragma once

#include "dyntex/io/json_util.hpp"
#include "dyntex/volume.hpp"

namespace dyntex::io {

// Volume file: `<name>.json` header {shape:[W,H,D], spacing_mm:[x,y,z],
// phase, dtype:"f32"} beside `<name>.raw`, little-endian float32, x fastest.

fs::path raw_path_for(const fs::path& header);

void write_volume(const fs::path& header, const Volume& vol);
Volume read_volume(const fs::path& header);

}  // namespace dyntex::io
