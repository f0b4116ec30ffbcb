#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geoat/geo.hpp"

namespace geoat::data {

/// One dataset triplet: audio reference, binary label vector, GSC source.
/// At least one GSC source (geo, gsc_tags, or gsc_embedding_ref) must be
/// present when a fusion variant consumes the record.
struct ClipRecord {
  std::string id;
  std::string audio_path;
  std::vector<uint8_t> labels;
  std::optional<geo::GeoPoint> geo;
  std::optional<std::vector<std::string>> gsc_tags;
  std::optional<std::string> gsc_embedding_ref;

  bool has_gsc_source() const {
    return geo.has_value() || gsc_tags.has_value() || gsc_embedding_ref.has_value();
  }
};

/// Line-delimited JSON, one record per line, UTF-8. All records must agree on
/// the label count and labels must be 0/1.
std::vector<ClipRecord> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ClipRecord>& records);

int label_count(const std::vector<ClipRecord>& records);

struct SplitSpec {
  double train_fraction = 0.70;
  double val_fraction = 0.15;
  double test_fraction = 0.15;
  uint64_t seed = 0;

  void validate() const;
};

struct SplitResult {
  std::vector<size_t> train, val, test;
  /// Labels with fewer than 3 positives: they cannot cover all three subsets.
  /// Flagged rather than silently dropped.
  std::vector<int> flagged_labels;
};

/// Iterative multi-label stratification: repeatedly pick the label with the
/// fewest unassigned positives and send its clips to the subset with the
/// greatest remaining demand for that label; ties broken by greatest total
/// remaining capacity, then by seed-keyed randomness. A repair pass moves one
/// positive into test for any label that ended up absent there (when
/// feasible). Deterministic under seed.
SplitResult iterative_stratified_split(const std::vector<ClipRecord>& records,
                                       const SplitSpec& spec);

}  // namespace geoat::data
