#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dyntex/io/json_util.hpp"

namespace dyntex::io {

struct GrayImage {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Binary PGM (P5, maxval 255).
/// `comment`, if non-empty, is written as a single `#` line after the magic number.
std::string encode_pgm(const GrayImage& img, std::string_view comment = {});
GrayImage decode_pgm(const std::string& bytes);

void write_pgm(const fs::path& path, const GrayImage& img);
GrayImage read_pgm(const fs::path& path);

}  // namespace dyntex::io
