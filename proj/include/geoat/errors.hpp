#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace geoat {

/// Base class for all toolkit errors. `code()` is the stable machine-readable
/// identifier the CLI emits in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define GEOAT_ERROR(NAME, CODE)                                      \
  class NAME : public Error {                                        \
   public:                                                           \
    explicit NAME(const std::string& msg) : Error(CODE, msg) {}      \
  };

// geo-ingest
GEOAT_ERROR(InvalidGeoPoint, "invalid_geo_point")
GEOAT_ERROR(InvalidBBox, "invalid_bbox")
GEOAT_ERROR(PolarLatitude, "polar_latitude")
GEOAT_ERROR(InvalidSide, "invalid_side")
GEOAT_ERROR(NetworkError, "network_error")
GEOAT_ERROR(RateLimited, "rate_limited")
GEOAT_ERROR(ParseError, "parse_error")
GEOAT_ERROR(MissingField, "missing_field")

// gsc-encode
GEOAT_ERROR(EmptyDescriptor, "empty_descriptor")
GEOAT_ERROR(DimMismatch, "dim_mismatch")
GEOAT_ERROR(MissingEmbedding, "missing_embedding")
GEOAT_ERROR(BadMagic, "bad_magic")
GEOAT_ERROR(TruncatedFile, "truncated_file")
GEOAT_ERROR(DuplicateKey, "duplicate_key")

// signal
GEOAT_ERROR(UnsupportedFormat, "unsupported_format")
GEOAT_ERROR(CorruptHeader, "corrupt_header")

// tensor-core
GEOAT_ERROR(ShapeMismatch, "shape_mismatch")
GEOAT_ERROR(NumericFault, "numeric_fault")
GEOAT_ERROR(NonScalarLoss, "non_scalar_loss")

// fusion-models
GEOAT_ERROR(WrongBackbone, "wrong_backbone")

// train-eval
GEOAT_ERROR(InfeasibleSplit, "infeasible_split")
GEOAT_ERROR(MissingGsc, "missing_gsc")
GEOAT_ERROR(NoPositives, "no_positives")
GEOAT_ERROR(DegenerateClass, "degenerate_class")
GEOAT_ERROR(Degenerate, "degenerate")
GEOAT_ERROR(ClassMismatch, "class_mismatch")

// stats
GEOAT_ERROR(NoItems, "no_items")
GEOAT_ERROR(DegenerateData, "degenerate_data")
GEOAT_ERROR(AllZeroDifferences, "all_zero_differences")
GEOAT_ERROR(DegenerateVariance, "degenerate_variance")

// zeroshot-map
GEOAT_ERROR(AllTokensOov, "all_tokens_oov")

// generic
GEOAT_ERROR(IoError, "io_error")
GEOAT_ERROR(ConfigError, "config_error")

#undef GEOAT_ERROR

}  // namespace geoat
