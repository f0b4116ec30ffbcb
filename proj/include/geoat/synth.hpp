#pragma once

#include <string>
#include <vector>

#include "geoat/dataset.hpp"

namespace geoat::synth {

/// Audio prototype plus GSC context for one synthetic class.
struct ClassProto {
  std::vector<double> freqs_hz;
  std::vector<double> amps;
  double noise_level = 0.05;
  std::vector<std::string> descriptors;  // GSC tags for clips of this class
};

/// A synthetic world: per-class prototypes with one acoustically confounded
/// pair (identical audio prototype, disjoint descriptor multisets).
struct WorldSpec {
  int num_classes = 8;
  int confounded_a = 0;
  int confounded_b = 1;
  int clips_per_class = 60;
  double polyphony_prob = 0.25;
  uint64_t seed = 0;
  std::vector<ClassProto> protos;  // empty => default_world() prototypes

  void validate() const;
};

/// Prototype set for `num_classes` classes where classes confounded_a and
/// confounded_b share the audio prototype but carry disjoint descriptors.
std::vector<ClassProto> default_world(const WorldSpec& spec);

struct GeneratedWorld {
  std::vector<data::ClipRecord> records;
  std::string manifest_path;
};

/// Writes WAV clips (16 kHz mono PCM16, 10 s) and a line-delimited JSON
/// manifest with labels and gsc_tags under out_dir. Bit-identical output for
/// identical (spec, out_dir).
GeneratedWorld generate_world(const WorldSpec& spec, const std::string& out_dir);

}  // namespace geoat::synth
