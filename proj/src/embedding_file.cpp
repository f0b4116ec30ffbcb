#include "geoat/embedding_file.hpp"

#include <cstring>
#include <fstream>

namespace geoat::gsc {

namespace {

// Readers below assume a little-endian host, which covers every platform this
// toolkit targets; the asserts in read/write keep the format honest.
void put_u32(std::string& out, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

uint32_t take_u32(const std::string& buf, size_t& off) {
  if (off + 4 > buf.size()) throw TruncatedFile("unexpected end of file in header");
  uint32_t v;
  std::memcpy(&v, buf.data() + off, 4);
  off += 4;
  return v;
}

}  // namespace

const float* EmbeddingFile::find(const std::string& key) const {
  if (!index_valid_) {
    index_.clear();
    for (size_t i = 0; i < keys.size(); ++i) index_[keys[i]] = i;
    index_valid_ = true;
  }
  auto it = index_.find(key);
  if (it == index_.end()) return nullptr;
  return data.data() + it->second * dim;
}

void EmbeddingFile::append(const std::string& key, const std::vector<float>& row) {
  if (dim == 0) dim = (uint32_t)row.size();
  if (row.size() != dim) {
    throw DimMismatch("row for '" + key + "' has length " + std::to_string(row.size()) +
                      ", table dim is " + std::to_string(dim));
  }
  if (find(key) != nullptr) throw DuplicateKey("duplicate key: " + key);
  keys.push_back(key);
  data.insert(data.end(), row.begin(), row.end());
  index_valid_ = false;
}

void EmbeddingFile::validate() const {
  if (data.size() != (size_t)dim * keys.size()) {
    throw TruncatedFile("data length does not match dim * count");
  }
  std::unordered_map<std::string, size_t> seen;
  for (const auto& k : keys) {
    if (!seen.emplace(k, 0).second) throw DuplicateKey("duplicate key: " + k);
  }
}

EmbeddingFile read_embedding_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < 8 || std::memcmp(buf.data(), EmbeddingFile::kMagic, 8) != 0) {
    throw BadMagic("not an embedding file: " + path);
  }
  size_t off = 8;
  EmbeddingFile t;
  t.dim = take_u32(buf, off);
  const uint32_t count = take_u32(buf, off);

  t.keys.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t len = take_u32(buf, off);
    if (off + len > buf.size()) throw TruncatedFile("key " + std::to_string(i) + " truncated");
    t.keys.emplace_back(buf.data() + off, len);
    off += len;
  }

  const size_t payload = (size_t)count * t.dim * sizeof(float);
  if (off + payload > buf.size()) {
    throw TruncatedFile("payload smaller than count*dim in " + path);
  }
  t.data.resize((size_t)count * t.dim);
  std::memcpy(t.data.data(), buf.data() + off, payload);
  t.validate();
  return t;
}

void write_embedding_file(const std::string& path, const EmbeddingFile& table) {
  table.validate();
  std::string buf;
  buf.append(EmbeddingFile::kMagic, 8);
  put_u32(buf, table.dim);
  put_u32(buf, (uint32_t)table.count());
  for (const auto& k : table.keys) {
    put_u32(buf, (uint32_t)k.size());
    buf.append(k);
  }
  const char* raw = reinterpret_cast<const char*>(table.data.data());
  buf.append(raw, table.data.size() * sizeof(float));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(buf.data(), (std::streamsize)buf.size());
}

}  // namespace geoat::gsc
