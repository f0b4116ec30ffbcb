#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "geoat/embedding_file.hpp"
#include "geoat/geo.hpp"

namespace geoat::gsc {

/// "<key>: <value>", lowercase, whitespace collapsed.
struct Descriptor {
  std::string text;
  bool operator==(const Descriptor&) const = default;
};

Descriptor make_descriptor(const std::string& key, const std::string& value);

/// Normalize a raw descriptor string (manifest gsc_tags entry) into the
/// canonical lowercase, whitespace-collapsed form.
Descriptor normalize_descriptor(const std::string& raw);

enum class GscSource { hashed, imported };

/// Fixed-length geospatial semantic context vector.
struct GscVector {
  Eigen::VectorXd values;
  GscSource source = GscSource::hashed;
  bool empty_context = false;

  Eigen::Index dim() const { return values.size(); }
};

inline constexpr int kDefaultGscDim = 768;

/// One descriptor per entity, from (matched_key, matched_value). With
/// dedupe=false duplicates are retained so POI composition weights the mean;
/// dedupe=true keeps the first occurrence, order preserved.
std::vector<Descriptor> descriptors_from_entities(const std::vector<geo::PoiEntity>& entities,
                                                  bool dedupe = false);

/// Deterministic feature-hashing embedding: tokens hashed to a (index, sign)
/// pair, +-1 accumulation, L2-normalized. Throws EmptyDescriptor when no
/// tokens survive tokenization.
Eigen::VectorXd hash_embed(const Descriptor& d, int dim);

/// Element-wise arithmetic mean. Empty input yields the all-zero vector with
/// empty_context set.
GscVector mean_pool(const std::vector<Eigen::VectorXd>& vectors, int dim);

/// Encoder selection for encode_gsc.
struct GscEncoder {
  static GscEncoder hashed(int dim) { return {nullptr, dim}; }
  static GscEncoder imported(const EmbeddingFile& file) { return {&file, (int)file.dim}; }

  const EmbeddingFile* file = nullptr;  // nullptr => hashed
  int dim = kDefaultGscDim;
};

/// descriptors -> per-descriptor vectors -> mean_pool. For the imported path
/// every descriptor text must be a key in the file (MissingEmbedding).
GscVector encode_gsc(const std::vector<geo::PoiEntity>& entities, const GscEncoder& encoder,
                     bool dedupe = false);

/// Same pipeline starting from pre-built descriptor texts (manifest gsc_tags).
GscVector encode_gsc_texts(const std::vector<std::string>& descriptor_texts,
                           const GscEncoder& encoder);

}  // namespace geoat::gsc
