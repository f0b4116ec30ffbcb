#pragma once

#include <string>
#include <vector>

#include "geoat/tensor.hpp"

namespace geoat::nn {

struct NamedTensor {
  std::string name;
  Tensor value;
};

/// Parameter checkpoint: a human-readable config document plus named float64
/// tensors with their shapes.
///
/// Layout (little-endian):
///   magic     8 bytes "GEOCKPT1"
///   doc_len   u32, then UTF-8 config document
///   count     u32
///   per parameter: u32 name length + name, u32 rank, u32 dims..., f64 data
struct Checkpoint {
  std::string config_doc;
  std::vector<NamedTensor> params;

  static constexpr char kMagic[9] = "GEOCKPT1";

  const NamedTensor* find(const std::string& name) const;
};

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

/// Stable digest of the serialized bytes; used by reproducibility checks.
std::string checkpoint_digest(const Checkpoint& ckpt);

}  // namespace geoat::nn
