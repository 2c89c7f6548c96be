#include "dyntex/io/pgm.hpp"

#include <cctype>

namespace dyntex::io {

std::string encode_pgm(const GrayImage& img, std::string_view comment) {
  if (img.pixels.size() != img.width * img.height) throw std::invalid_argument("pgm: pixel count does not match size");
  if (comment.find('\n') != std::string_view::npos) throw std::invalid_argument("pgm: comment spans lines");
  std::string out = "P5\n";
  if (!comment.empty()) out += "# " + std::string(comment) + "\n";
  out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(img.pixels.begin(), img.pixels.end());
  return out;
}

GrayImage decode_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> std::size_t {
    skip_space();
    std::size_t v = 0, digits = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + static_cast<std::size_t>(bytes[pos++] - '0');
      ++digits;
    }
    if (!digits) throw IoError("pgm: malformed header");
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw IoError("pgm: not a binary P5 file");
  pos = 2;
  GrayImage img;
  img.width = number();
  img.height = number();
  if (number() != 255) throw IoError("pgm: only maxval 255 is supported");
  ++pos;  // single whitespace before the raster
  if (bytes.size() - pos != img.width * img.height) throw IoError("pgm: raster size does not match header");
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

void write_pgm(const fs::path& path, const GrayImage& img) { write_text(path, encode_pgm(img)); }

GrayImage read_pgm(const fs::path& path) { return decode_pgm(read_text(path)); }

}  // namespace dyntex::io
