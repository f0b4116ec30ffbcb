#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "geoat/errors.hpp"

namespace geoat::gsc {

/// Binary table of named float32 vectors.
///
/// Layout (little-endian):
///   magic   8 bytes "GEOEMB01"
///   dim     u32
///   count   u32
///   keys    count x (u32 length + UTF-8 bytes)
///   data    count x dim x f32
struct EmbeddingFile {
  uint32_t dim = 0;
  std::vector<std::string> keys;
  std::vector<float> data;  // count * dim, row per key

  static constexpr char kMagic[9] = "GEOEMB01";

  size_t count() const { return keys.size(); }

  /// Row for `key`, or nullptr when absent.
  const float* find(const std::string& key) const;

  void append(const std::string& key, const std::vector<float>& row);

  /// Validates key uniqueness and data/header arithmetic.
  void validate() const;

 private:
  mutable std::unordered_map<std::string, size_t> index_;  // lazy, rebuilt on demand
  mutable bool index_valid_ = false;
};

EmbeddingFile read_embedding_file(const std::string& path);
void write_embedding_file(const std::string& path, const EmbeddingFile& table);

}  // namespace geoat::gsc
