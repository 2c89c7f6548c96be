#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dyntex/io/json_util.hpp"
#include "dyntex/numerics/tensor.hpp"

namespace dyntex::io {

inline constexpr int kCheckpointFormat = 1;

/// `header.json` (format version, kind, config, tensor names and shapes)
/// plus one raw little-endian float32 blob per tensor.
struct Checkpoint {
  std::string kind;
  Json config = Json::object();
  std::vector<std::pair<std::string, Tensor64>> tensors;

  const Tensor64& tensor(const std::string& name) const;
};

void save_checkpoint(const fs::path& dir, const Checkpoint& ck);
Checkpoint load_checkpoint(const fs::path& dir);

}  // namespace dyntex::io
