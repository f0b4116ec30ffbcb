#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "geoat/overpass.hpp"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace geoat::geo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

uint64_t fnv1a64(const std::string& s, uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const fs::path& p, const std::string& body) {
  fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(body.data(), (std::streamsize)body.size());
  }
  fs::rename(tmp, p);
}

double monotonic_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint is not a URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/api/interpreter"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::optional<GeoPoint> element_center(const json& el) {
  if (el.contains("lat") && el.contains("lon")) {
    return GeoPoint(el.at("lat").get<double>(), el.at("lon").get<double>());
  }
  if (el.contains("center")) {
    const auto& c = el.at("center");
    if (c.contains("lat") && c.contains("lon")) {
      return GeoPoint(c.at("lat").get<double>(), c.at("lon").get<double>());
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<PoiEntity> parse_overpass_response(const std::string& body,
                                               const std::vector<std::string>& keys) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed overpass response at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  if (!doc.is_object() || !doc.contains("elements") || !doc.at("elements").is_array()) {
    throw ParseError("overpass response lacks an elements array");
  }

  std::vector<PoiEntity> out;
  for (const auto& el : doc.at("elements")) {
    if (!el.is_object()) throw ParseError("overpass element is not an object");
    if (!el.contains("tags") || !el.at("tags").is_object()) continue;

    std::map<std::string, std::string> tags;
    for (const auto& [k, v] : el.at("tags").items()) {
      tags[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }

    bool matched_any = false;
    for (const auto& key : keys) {
      auto it = tags.find(key);
      if (it == tags.end()) continue;
      if (!el.contains("id")) throw MissingField("overpass element lacks an id");
      matched_any = true;
      PoiEntity e;
      e.osm_id = el.at("id").get<long long>();
      e.matched_key = key;
      e.matched_value = it->second;
      e.tags = tags;
      e.center = element_center(el);
      out.push_back(std::move(e));
    }
    (void)matched_any;
  }
  return out;
}

std::string request_digest(const GeoPoint& p, const GscQueryConfig& cfg) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "lat=%.7f;lon=%.7f;side=%.3f;", p.lat, p.lon, cfg.side_m);
  std::string canon = buf;
  canon += "keys=";
  for (const auto& k : cfg.feature_keys) {
    canon += k;
    canon += ',';
  }
  canon += ";endpoint=" + cfg.endpoint;
  uint64_t h1 = fnv1a64(canon);
  uint64_t h2 = fnv1a64(canon, 0x9e3779b97f4a7c15ull);
  char hex[33];
  std::snprintf(hex, sizeof(hex), "%016llx%016llx", (unsigned long long)h1,
                (unsigned long long)h2);
  return hex;
}

OverpassClient::OverpassClient(GscQueryConfig cfg) : cfg_(std::move(cfg)) {
  if (const char* env = std::getenv(kEndpointEnvVar); env && *env) {
    cfg_.endpoint = env;
  }
  cfg_.validate();
}

std::string OverpassClient::cache_body_path(const std::string& digest) const {
  return (fs::path(cfg_.cache_dir) / (digest + ".json")).string();
}

std::string OverpassClient::cache_meta_path(const std::string& digest) const {
  return (fs::path(cfg_.cache_dir) / (digest + ".meta")).string();
}

void OverpassClient::wait_for_slot() {
  std::lock_guard<std::mutex> lock(dispatch_mutex_);
  const double now = monotonic_seconds();
  if (last_dispatch_ >= 0.0) {
    const double wait = cfg_.min_request_interval_s - (now - last_dispatch_);
    if (wait > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
  last_dispatch_ = monotonic_seconds();
}

std::string OverpassClient::http_post(const std::string& query) {
  const ParsedUrl url = split_url(cfg_.endpoint);
  int last_status = 0;
  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::duration<double>(cfg_.backoff_base_s * (1 << (attempt - 1))));
    }
    wait_for_slot();
    httplib::Client client(url.base);
    client.set_connection_timeout(std::chrono::duration<double>(cfg_.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(cfg_.timeout_s));
    auto res = client.Post(url.path, httplib::Params{{"data", query}});
    if (!res) {
      last_status = 0;
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    last_status = res->status;
    last_error = "HTTP " + std::to_string(res->status);
  }
  if (last_status == 429 || last_status == 504) {
    throw RateLimited("overpass endpoint throttling (" + last_error + ") after " +
                      std::to_string(cfg_.max_retries + 1) + " attempts");
  }
  throw NetworkError("overpass request failed (" + last_error + ") after " +
                     std::to_string(cfg_.max_retries + 1) + " attempts");
}

std::vector<PoiEntity> OverpassClient::fetch_pois(const GeoPoint& p) {
  const std::string digest = request_digest(p, cfg_);
  const std::string body_path = cache_body_path(digest);

  if (!cfg_.force_refetch && fs::exists(body_path)) {
    const std::string body = read_file(body_path);
    try {
      return parse_overpass_response(body, cfg_.feature_keys);
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " (cached response " + body_path + ")");
    }
  }

  const BBox box = bbox_from_center(p, cfg_.side_m);
  const std::string query = build_overpass_query(box, cfg_.feature_keys, cfg_.timeout_s);
  const std::string body = http_post(query);

  json meta{{"lat", p.lat},
            {"lon", p.lon},
            {"side_m", cfg_.side_m},
            {"keys", cfg_.feature_keys},
            {"endpoint", cfg_.endpoint}};
  atomic_write(body_path, body);
  atomic_write(cache_meta_path(digest), meta.dump(2) + "\n");

  return parse_overpass_response(body, cfg_.feature_keys);
}

}  // namespace geoat::geo
