#include "geoat/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace geoat::audio {

namespace {

uint32_t u32le(const char* p) {
  uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

uint16_t u16le(const char* p) {
  uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

void put_u32(std::string& s, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  s.append(b, 4);
}

void put_u16(std::string& s, uint16_t v) {
  char b[2];
  std::memcpy(b, &v, 2);
  s.append(b, 2);
}

}  // namespace

AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw CorruptHeader("not a RIFF/WAVE file: " + path);
  }

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const char* data = nullptr;
  size_t data_len = 0;

  size_t off = 12;
  while (off + 8 <= buf.size()) {
    const char* id = buf.data() + off;
    const uint32_t len = u32le(buf.data() + off + 4);
    off += 8;
    if (off + len > buf.size()) throw CorruptHeader("chunk overruns file: " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw CorruptHeader("fmt chunk too short: " + path);
      format = u16le(buf.data() + off);
      channels = u16le(buf.data() + off + 2);
      rate = u32le(buf.data() + off + 4);
      bits = u16le(buf.data() + off + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = buf.data() + off;
      data_len = len;
    }
    off += len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) throw CorruptHeader("missing fmt or data chunk: " + path);
  if (format != 1 || bits != 16) {
    throw UnsupportedFormat("expected PCM16, got format=" + std::to_string(format) +
                            " bits=" + std::to_string(bits) + " in " + path);
  }
  if (channels != 1) {
    throw UnsupportedFormat("expected mono, got " + std::to_string(channels) +
                            " channels in " + path);
  }
  if (rate != (uint32_t)kSampleRate) {
    throw UnsupportedFormat("expected " + std::to_string(kSampleRate) + " Hz, got " +
                            std::to_string(rate) + " Hz in " + path);
  }

  const size_t n = data_len / 2;
  AudioClip clip;
  clip.samples = Eigen::VectorXd::Zero(kClipSamples);
  const size_t keep = std::min(n, (size_t)kClipSamples);
  for (size_t i = 0; i < keep; ++i) {
    int16_t s;
    std::memcpy(&s, data + 2 * i, 2);
    clip.samples[(Eigen::Index)i] = (double)s / 32768.0;
  }
  return clip;
}

void write_wav(const std::string& path, const Eigen::VectorXd& samples) {
  const uint32_t n = (uint32_t)samples.size();
  std::string out;
  out.reserve(44 + 2 * n);
  out.append("RIFF", 4);
  put_u32(out, 36 + 2 * n);
  out.append("WAVE", 4);
  out.append("fmt ", 4);
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, kSampleRate);
  put_u32(out, kSampleRate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.append("data", 4);
  put_u32(out, 2 * n);
  for (uint32_t i = 0; i < n; ++i) {
    const double clamped = std::min(1.0, std::max(-1.0, samples[(Eigen::Index)i]));
    const auto s = (int16_t)std::lrint(clamped * 32767.0);
    char b[2];
    std::memcpy(b, &s, 2);
    out.append(b, 2);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f.write(out.data(), (std::streamsize)out.size());
}

}  // namespace geoat::audio
