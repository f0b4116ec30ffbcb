#pragma once

#include <Eigen/Dense>
#include <string>

#include "geoat/wav.hpp"

namespace geoat::audio {

enum class MelScale { htk, slaney };

struct MelConfig {
  int n_mels = 64;
  int win_length = 512;  // 32 ms at 16 kHz
  int hop_length = 160;  // 10 ms
  int n_fft = 512;
  double fmin_hz = 50.0;
  double fmax_hz = 8000.0;
  MelScale scale = MelScale::htk;
  double log_floor = 1e-10;

  /// Self-describing parameter digest stored with every spectrogram.
  std::string digest() const;
};

/// Log-Mel spectrogram, frames as a T x F matrix of log-energies.
struct MelSpec {
  Eigen::MatrixXd frames;  // T x F
  std::string config_digest;

  Eigen::Index num_frames() const { return frames.rows(); }
  Eigen::Index num_bins() const { return frames.cols(); }
};

double hz_to_mel(double hz, MelScale scale);
double mel_to_hz(double mel, MelScale scale);

/// Triangular mel filterbank over FFT bin center frequencies; n_mels rows,
/// n_fft/2+1 columns.
Eigen::MatrixXd mel_filterbank(const MelConfig& cfg);

/// Hann-windowed magnitude spectrogram, mel filterbank, log(x + floor).
/// T = 1 + floor((len - win) / hop).
MelSpec logmel(const AudioClip& clip, const MelConfig& cfg = {});

}  // namespace geoat::audio
