#include "geoat/gsc.hpp"

#include <cctype>
#include <cstdint>
#include <unordered_set>

namespace geoat::gsc {

namespace {

std::string normalize(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += (char)std::tolower(c);
  }
  return out;
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur += (char)c;
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

}  // namespace

Descriptor make_descriptor(const std::string& key, const std::string& value) {
  return Descriptor{normalize(key) + ": " + normalize(value)};
}

Descriptor normalize_descriptor(const std::string& raw) {
  return Descriptor{normalize(raw)};
}

std::vector<Descriptor> descriptors_from_entities(const std::vector<geo::PoiEntity>& entities,
                                                  bool dedupe) {
  std::vector<Descriptor> out;
  out.reserve(entities.size());
  std::unordered_set<std::string> seen;
  for (const auto& e : entities) {
    Descriptor d = make_descriptor(e.matched_key, e.matched_value);
    if (dedupe && !seen.insert(d.text).second) continue;
    out.push_back(std::move(d));
  }
  return out;
}

Eigen::VectorXd hash_embed(const Descriptor& d, int dim) {
  if (dim < 2) throw DimMismatch("hash_embed requires dim >= 2");
  const auto tokens = tokenize(d.text);
  if (tokens.empty()) throw EmptyDescriptor("no tokens in descriptor '" + d.text + "'");

  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (const auto& tok : tokens) {
    const uint64_t h = fnv1a64(tok);
    // Index from the low 32 bits, sign from bit 63: disjoint hash regions.
    const int idx = (int)((h & 0xffffffffull) % (uint64_t)dim);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[idx] += sign;
  }
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

GscVector mean_pool(const std::vector<Eigen::VectorXd>& vectors, int dim) {
  GscVector g;
  g.values = Eigen::VectorXd::Zero(dim);
  if (vectors.empty()) {
    g.empty_context = true;
    return g;
  }
  for (const auto& v : vectors) {
    if (v.size() != dim) {
      throw DimMismatch("mean_pool: vector length " + std::to_string(v.size()) +
                        " vs dim " + std::to_string(dim));
    }
    g.values += v;
  }
  g.values /= (double)vectors.size();
  return g;
}

GscVector encode_gsc_texts(const std::vector<std::string>& descriptor_texts,
                           const GscEncoder& encoder) {
  std::vector<Eigen::VectorXd> vecs;
  vecs.reserve(descriptor_texts.size());
  for (const auto& raw : descriptor_texts) {
    const Descriptor d = normalize_descriptor(raw);
    if (encoder.file != nullptr) {
      const float* row = encoder.file->find(d.text);
      if (row == nullptr) {
        throw MissingEmbedding("no embedding for descriptor '" + d.text + "'");
      }
      Eigen::VectorXd v(encoder.dim);
      for (int i = 0; i < encoder.dim; ++i) v[i] = (double)row[i];
      vecs.push_back(std::move(v));
    } else {
      vecs.push_back(hash_embed(d, encoder.dim));
    }
  }
  GscVector g = mean_pool(vecs, encoder.dim);
  g.source = encoder.file != nullptr ? GscSource::imported : GscSource::hashed;
  return g;
}

GscVector encode_gsc(const std::vector<geo::PoiEntity>& entities, const GscEncoder& encoder,
                     bool dedupe) {
  const auto descriptors = descriptors_from_entities(entities, dedupe);
  std::vector<std::string> texts;
  texts.reserve(descriptors.size());
  for (const auto& d : descriptors) texts.push_back(d.text);
  return encode_gsc_texts(texts, encoder);
}

}  // namespace geoat::gsc
