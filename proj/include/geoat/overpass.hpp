#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "geoat/geo.hpp"

namespace geoat::geo {

/// Parse an Overpass JSON response body. One PoiEntity per (element, matched
/// key) pair, in document order then key order; elements carrying none of the
/// keys are dropped. Throws ParseError (with byte offset) on malformed JSON
/// and MissingField on elements lacking an id.
std::vector<PoiEntity> parse_overpass_response(const std::string& body,
                                               const std::vector<std::string>& keys);

/// Digest identifying one POI request: (lat, lon, side_m, keys, endpoint).
/// Used as the cache file stem.
std::string request_digest(const GeoPoint& p, const GscQueryConfig& cfg);

/// Overpass client with a content-addressed response cache and a shared rate
/// limiter. Fetches for distinct coordinates may run concurrently; dispatch to
/// the endpoint is serialized and spaced by min_request_interval_s. Cache
/// writes are atomic (write-temp-then-rename).
class OverpassClient {
 public:
  explicit OverpassClient(GscQueryConfig cfg);

  /// Cache hit: re-parse the stored body, zero network calls. Miss: POST the
  /// query, store the body, parse. Retries up to cfg.max_retries with
  /// exponential backoff; HTTP 429/504 surface as RateLimited once retries
  /// are exhausted, other transport failures as NetworkError.
  std::vector<PoiEntity> fetch_pois(const GeoPoint& p);

  const GscQueryConfig& config() const { return cfg_; }

  /// Environment variable that overrides cfg.endpoint when set.
  static constexpr const char* kEndpointEnvVar = "GEOAT_OVERPASS_ENDPOINT";

 private:
  std::string cache_body_path(const std::string& digest) const;
  std::string cache_meta_path(const std::string& digest) const;
  std::string http_post(const std::string& query);
  void wait_for_slot();

  GscQueryConfig cfg_;
  std::mutex dispatch_mutex_;
  double last_dispatch_ = -1.0;  // monotonic seconds; guarded by dispatch_mutex_
};

}  // namespace geoat::geo
