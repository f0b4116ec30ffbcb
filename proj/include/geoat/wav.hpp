#pragma once

#include <Eigen/Dense>
#include <string>

#include "geoat/errors.hpp"

namespace geoat::audio {

inline constexpr int kSampleRate = 16000;
inline constexpr int kClipSamples = 160000;  // fixed 10 s

/// Mono 16 kHz clip, samples in [-1, 1], exactly kClipSamples long after load
/// (shorter files are zero-padded, longer ones truncated).
struct AudioClip {
  Eigen::VectorXd samples;
  int sample_rate = kSampleRate;
};

/// Reads a RIFF/WAVE file. Only PCM16 mono 16 kHz is accepted; anything else
/// raises UnsupportedFormat (no silent resampling). Malformed containers
/// raise CorruptHeader.
AudioClip load_wav(const std::string& path);

/// Writes samples as PCM16 mono 16 kHz. Values are clamped to [-1, 1].
void write_wav(const std::string& path, const Eigen::VectorXd& samples);

}  // namespace geoat::audio
