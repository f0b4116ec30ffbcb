#include "geoat/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <unordered_set>

namespace geoat::nn {

namespace {

void put_u32(std::string& out, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

uint32_t take_u32(const std::string& buf, size_t& off) {
  if (off + 4 > buf.size()) throw TruncatedFile("checkpoint truncated in header");
  uint32_t v;
  std::memcpy(&v, buf.data() + off, 4);
  off += 4;
  return v;
}

std::string serialize(const Checkpoint& ckpt) {
  std::unordered_set<std::string> seen;
  for (const auto& p : ckpt.params) {
    if (!seen.insert(p.name).second) throw DuplicateKey("duplicate parameter: " + p.name);
  }
  std::string buf;
  buf.append(Checkpoint::kMagic, 8);
  put_u32(buf, (uint32_t)ckpt.config_doc.size());
  buf.append(ckpt.config_doc);
  put_u32(buf, (uint32_t)ckpt.params.size());
  for (const auto& p : ckpt.params) {
    put_u32(buf, (uint32_t)p.name.size());
    buf.append(p.name);
    put_u32(buf, (uint32_t)p.value.shape.size());
    for (auto d : p.value.shape) put_u32(buf, (uint32_t)d);
    const char* raw = reinterpret_cast<const char*>(p.value.data.data());
    buf.append(raw, (size_t)p.value.numel() * sizeof(double));
  }
  return buf;
}

}  // namespace

const NamedTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string buf = serialize(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(buf.data(), (std::streamsize)buf.size());
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < 8 || std::memcmp(buf.data(), Checkpoint::kMagic, 8) != 0) {
    throw BadMagic("not a checkpoint file: " + path);
  }
  size_t off = 8;
  Checkpoint ckpt;
  const uint32_t doc_len = take_u32(buf, off);
  if (off + doc_len > buf.size()) throw TruncatedFile("config document truncated in " + path);
  ckpt.config_doc.assign(buf.data() + off, doc_len);
  off += doc_len;

  const uint32_t count = take_u32(buf, off);
  std::unordered_set<std::string> seen;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = take_u32(buf, off);
    if (off + name_len > buf.size()) throw TruncatedFile("parameter name truncated");
    NamedTensor p;
    p.name.assign(buf.data() + off, name_len);
    off += name_len;
    if (!seen.insert(p.name).second) throw DuplicateKey("duplicate parameter: " + p.name);
    const uint32_t rank = take_u32(buf, off);
    Shape shape(rank);
    for (uint32_t d = 0; d < rank; ++d) shape[d] = (Eigen::Index)take_u32(buf, off);
    const Eigen::Index n = shape_numel(shape);
    if (off + (size_t)n * sizeof(double) > buf.size()) {
      throw TruncatedFile("parameter data truncated for " + p.name);
    }
    p.value = Tensor::zeros(shape);
    std::memcpy(p.value.data.data(), buf.data() + off, (size_t)n * sizeof(double));
    off += (size_t)n * sizeof(double);
    ckpt.params.push_back(std::move(p));
  }
  return ckpt;
}

std::string checkpoint_digest(const Checkpoint& ckpt) {
  const std::string buf = serialize(ckpt);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : buf) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", (unsigned long long)h);
  return hex;
}

}  // namespace geoat::nn
