#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoat/errors.hpp"

namespace geoat::geo {

/// WGS84 coordinate in degrees. Construction validates ranges.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  GeoPoint() = default;
  GeoPoint(double lat_deg, double lon_deg);
};

/// Axis-aligned bounding box in degrees. south < north, west < east;
/// antimeridian-crossing boxes are rejected.
struct BBox {
  double south = 0.0;
  double west = 0.0;
  double north = 0.0;
  double east = 0.0;

  BBox() = default;
  BBox(double south_deg, double west_deg, double north_deg, double east_deg);

  GeoPoint center() const { return GeoPoint{(south + north) / 2.0, (west + east) / 2.0}; }
  bool contains(const BBox& inner) const {
    return south <= inner.south && west <= inner.west && north >= inner.north &&
           east >= inner.east;
  }
};

/// One OSM entity matched by a configured feature key. An element carrying
/// two configured keys appears as two entities, one per key.
struct PoiEntity {
  long long osm_id = 0;
  std::string matched_key;
  std::string matched_value;
  std::map<std::string, std::string> tags;
  std::optional<GeoPoint> center;
};

/// Request parameters for GSC extraction around a coordinate.
struct GscQueryConfig {
  double side_m = 1000.0;
  std::vector<std::string> feature_keys = default_feature_keys();
  std::string endpoint = "https://overpass-api.de/api/interpreter";
  double timeout_s = 25.0;
  int max_retries = 3;
  double min_request_interval_s = 1.0;
  std::string cache_dir = "overpass_cache";
  bool force_refetch = false;
  double backoff_base_s = 0.5;

  void validate() const;

  /// landuse, amenity, natural, highway, building, leisure, shop, tourism,
  /// railway, waterway, aeroway
  static const std::vector<std::string>& default_feature_keys();
};

/// Meters per degree of latitude on the flat-earth approximation used for
/// box construction.
inline constexpr double kMetersPerDegree = 111320.0;

/// Square box of side `side_m` centered on `p`, with cosine correction for
/// longitude. Throws PolarLatitude for |lat| >= 89, InvalidSide for
/// side_m <= 0.
BBox bbox_from_center(const GeoPoint& p, double side_m);

/// Overpass QL text requesting nodes, ways and relations carrying any of
/// `keys` inside `box`. Byte-identical for identical inputs: keys in given
/// order, coordinates with exactly 7 decimal places.
std::string build_overpass_query(const BBox& box, const std::vector<std::string>& keys,
                                 double timeout_s = 25.0);

}  // namespace geoat::geo
