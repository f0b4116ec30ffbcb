#include "geoat/geo.hpp"

#include <cmath>
#include <cstdio>

namespace geoat::geo {

namespace {

bool finite(double v) { return std::isfinite(v); }

std::string fmt7(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.7f", v);
  return buf;
}

}  // namespace

GeoPoint::GeoPoint(double lat_deg, double lon_deg) : lat(lat_deg), lon(lon_deg) {
  if (!finite(lat) || !finite(lon) || lat < -90.0 || lat > 90.0 || lon < -180.0 ||
      lon > 180.0) {
    throw InvalidGeoPoint("coordinate out of range: lat=" + std::to_string(lat_deg) +
                          " lon=" + std::to_string(lon_deg));
  }
}

BBox::BBox(double south_deg, double west_deg, double north_deg, double east_deg)
    : south(south_deg), west(west_deg), north(north_deg), east(east_deg) {
  if (!finite(south) || !finite(west) || !finite(north) || !finite(east)) {
    throw InvalidBBox("non-finite box coordinate");
  }
  if (!(south < north)) {
    throw InvalidBBox("south must be strictly below north");
  }
  if (!(west < east)) {
    throw InvalidBBox("west must be strictly below east (antimeridian-crossing boxes rejected)");
  }
  if (east - west >= 360.0) {
    throw InvalidBBox("box spans a full degree wrap");
  }
}

void GscQueryConfig::validate() const {
  if (side_m <= 0.0) throw InvalidSide("side_m must be > 0");
  if (feature_keys.empty()) throw ConfigError("feature_keys must be non-empty");
  for (size_t i = 0; i < feature_keys.size(); ++i) {
    for (size_t j = i + 1; j < feature_keys.size(); ++j) {
      if (feature_keys[i] == feature_keys[j]) {
        throw ConfigError("duplicate feature key: " + feature_keys[i]);
      }
    }
  }
  if (timeout_s <= 0.0 || max_retries < 0 || min_request_interval_s < 0.0) {
    throw ConfigError("invalid query timing configuration");
  }
}

const std::vector<std::string>& GscQueryConfig::default_feature_keys() {
  static const std::vector<std::string> keys = {
      "landuse", "amenity", "natural", "highway",  "building", "leisure",
      "shop",    "tourism", "railway", "waterway", "aeroway"};
  return keys;
}

BBox bbox_from_center(const GeoPoint& p, double side_m) {
  if (side_m <= 0.0) throw InvalidSide("side_m must be > 0, got " + std::to_string(side_m));
  if (std::abs(p.lat) >= 89.0) {
    throw PolarLatitude("latitude " + std::to_string(p.lat) +
                        " too close to the poles for the flat-earth conversion");
  }
  const double half = side_m / 2.0;
  const double dlat = half / kMetersPerDegree;
  const double dlon = half / (kMetersPerDegree * std::cos(p.lat * M_PI / 180.0));
  return BBox(p.lat - dlat, p.lon - dlon, p.lat + dlat, p.lon + dlon);
}

std::string build_overpass_query(const BBox& box, const std::vector<std::string>& keys,
                                 double timeout_s) {
  if (keys.empty()) throw ConfigError("at least one feature key required");
  const std::string bbox = fmt7(box.south) + "," + fmt7(box.west) + "," + fmt7(box.north) +
                           "," + fmt7(box.east);
  std::string q;
  q += "[out:json][timeout:" + std::to_string(std::max(1, (int)std::lround(timeout_s))) +
       "];\n(\n";
  for (const auto& key : keys) {
    for (const char* kind : {"node", "way", "relation"}) {
      q += "  ";
      q += kind;
      q += "[\"" + key + "\"](" + bbox + ");\n";
    }
  }
  q += ");\nout center;\n";
  return q;
}

}  // namespace geoat::geo
