#include "geoat/melspec.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <sstream>

namespace geoat::audio {

std::string MelConfig::digest() const {
  std::ostringstream ss;
  ss << "mel=" << n_mels << ";win=" << win_length << ";hop=" << hop_length
     << ";fft=" << n_fft << ";fmin=" << fmin_hz << ";fmax=" << fmax_hz
     << ";scale=" << (scale == MelScale::htk ? "htk" : "slaney") << ";floor=" << log_floor;
  return ss.str();
}

double hz_to_mel(double hz, MelScale scale) {
  if (scale == MelScale::htk) {
    return 2595.0 * std::log10(1.0 + hz / 700.0);
  }
  // Slaney: linear below 1 kHz, logarithmic above.
  const double f_sp = 200.0 / 3.0;
  const double min_log_hz = 1000.0;
  const double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (hz < min_log_hz) return hz / f_sp;
  return min_log_mel + std::log(hz / min_log_hz) / logstep;
}

double mel_to_hz(double mel, MelScale scale) {
  if (scale == MelScale::htk) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
  }
  const double f_sp = 200.0 / 3.0;
  const double min_log_hz = 1000.0;
  const double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (mel < min_log_mel) return mel * f_sp;
  return min_log_hz * std::exp(logstep * (mel - min_log_mel));
}

Eigen::MatrixXd mel_filterbank(const MelConfig& cfg) {
  const int n_bins = cfg.n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin_hz, cfg.scale);
  const double mel_hi = hz_to_mel(cfg.fmax_hz, cfg.scale);

  Eigen::VectorXd edges(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1), cfg.scale);
  }

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.n_mels, n_bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double hz = (double)k * kSampleRate / cfg.n_fft;
      double w = 0.0;
      if (hz > left && hz < center) {
        w = (hz - left) / (center - left);
      } else if (hz >= center && hz < right) {
        w = (right - hz) / (right - center);
      }
      fb(m, k) = w;
    }
  }
  return fb;
}

MelSpec logmel(const AudioClip& clip, const MelConfig& cfg) {
  const Eigen::Index len = clip.samples.size();
  const int T = 1 + (int)((len - cfg.win_length) / cfg.hop_length);
  const int n_bins = cfg.n_fft / 2 + 1;

  Eigen::VectorXd window(cfg.win_length);
  for (int n = 0; n < cfg.win_length; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / cfg.win_length);
  }

  const Eigen::MatrixXd fb = mel_filterbank(cfg);

  Eigen::FFT<double> fft;
  std::vector<double> frame(cfg.n_fft, 0.0);
  std::vector<std::complex<double>> spectrum;

  MelSpec out;
  out.frames.resize(T, cfg.n_mels);
  out.config_digest = cfg.digest();

  Eigen::VectorXd mag(n_bins);
  for (int t = 0; t < T; ++t) {
    const Eigen::Index start = (Eigen::Index)t * cfg.hop_length;
    for (int n = 0; n < cfg.win_length; ++n) frame[(size_t)n] = clip.samples[start + n] * window[n];
    for (int n = cfg.win_length; n < cfg.n_fft; ++n) frame[(size_t)n] = 0.0;
    fft.fwd(spectrum, frame);
    for (int k = 0; k < n_bins; ++k) mag[k] = std::abs(spectrum[(size_t)k]);
    out.frames.row(t) = ((fb * mag).array() + cfg.log_floor).log().transpose();
  }
  return out;
}

}  // namespace geoat::audio
