#include "geoat/synth.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>

#include "geoat/rng.hpp"
#include "geoat/wav.hpp"

namespace geoat::synth {

namespace fs = std::filesystem;

void WorldSpec::validate() const {
  if (num_classes < 2) throw ConfigError("synthetic world needs at least 2 classes");
  if (confounded_a == confounded_b || confounded_a < 0 || confounded_b < 0 ||
      confounded_a >= num_classes || confounded_b >= num_classes) {
    throw ConfigError("confounded pair must be two distinct class indices");
  }
  if (clips_per_class < 3) {
    throw ConfigError("need at least 3 clips per class to cover every split subset");
  }
  if (polyphony_prob < 0.0 || polyphony_prob > 1.0) {
    throw ConfigError("polyphony_prob must be in [0, 1]");
  }
  if (!protos.empty()) {
    if ((int)protos.size() != num_classes) {
      throw ConfigError("prototype count must equal num_classes");
    }
    const auto& a = protos[(size_t)confounded_a].descriptors;
    const auto& b = protos[(size_t)confounded_b].descriptors;
    for (const auto& d : a) {
      for (const auto& e : b) {
        if (d == e) {
          throw ConfigError("confounded pair descriptor multisets must be disjoint: " + d);
        }
      }
    }
  }
}

std::vector<ClassProto> default_world(const WorldSpec& spec) {
  // Frequency pairs far enough apart that non-confounded classes separate on
  // log-Mel energy alone; descriptor sets mimic real OSM tag pairs.
  const std::vector<ClassProto> base = {
      {{440.0, 1320.0}, {0.5, 0.3}, 0.05,
       {"amenity: school", "leisure: playground", "highway: residential"}},
      {{440.0, 1320.0}, {0.5, 0.3}, 0.05,
       {"railway: station", "landuse: industrial", "highway: primary"}},
      {{220.0, 660.0}, {0.5, 0.3}, 0.05, {"natural: water", "leisure: park"}},
      {{880.0, 2640.0}, {0.5, 0.3}, 0.05, {"aeroway: aerodrome", "landuse: commercial"}},
      {{110.0, 330.0}, {0.6, 0.2}, 0.05, {"waterway: river", "natural: wood"}},
      {{1760.0, 523.0}, {0.4, 0.4}, 0.05,
       {"amenity: place_of_worship", "tourism: attraction"}},
      {{2093.0, 3136.0}, {0.5, 0.3}, 0.05, {"shop: mall", "building: retail"}},
      {{150.0, 450.0}, {0.5, 0.3}, 0.10, {"landuse: farmland", "natural: grassland"}},
  };
  std::vector<ClassProto> out;
  for (int k = 0; k < spec.num_classes; ++k) {
    ClassProto p = base[(size_t)(k % (int)base.size())];
    if (k >= (int)base.size()) {
      // Shift duplicated prototypes so only the designated pair is confounded.
      for (auto& f : p.freqs_hz) f *= 1.0 + 0.37 * (double)(k / (int)base.size());
      p.descriptors.push_back("building: yes");
    }
    out.push_back(std::move(p));
  }
  // The designated pair shares the audio prototype of confounded_a.
  ClassProto& pb = out[(size_t)spec.confounded_b];
  const ClassProto& pa = out[(size_t)spec.confounded_a];
  const auto keep_descriptors = pb.descriptors;
  pb = pa;
  pb.descriptors = keep_descriptors;
  return out;
}

namespace {

void add_prototype(Eigen::VectorXd& samples, const ClassProto& proto, double gain,
                   nn::Rng& rng) {
  const Eigen::Index n = samples.size();
  for (size_t j = 0; j < proto.freqs_hz.size(); ++j) {
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    const double w = 2.0 * M_PI * proto.freqs_hz[j] / (double)audio::kSampleRate;
    const double amp = gain * proto.amps[j];
    for (Eigen::Index i = 0; i < n; ++i) {
      samples[i] += amp * std::sin(w * (double)i + phase);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    samples[i] += gain * proto.noise_level * rng.normal();
  }
}

}  // namespace

GeneratedWorld generate_world(const WorldSpec& spec_in, const std::string& out_dir) {
  WorldSpec spec = spec_in;
  spec.validate();
  if (spec.protos.empty()) spec.protos = default_world(spec);
  spec.validate();

  fs::create_directories(fs::path(out_dir) / "clips");

  GeneratedWorld world;
  for (int k = 0; k < spec.num_classes; ++k) {
    const ClassProto& proto = spec.protos[(size_t)k];
    for (int c = 0; c < spec.clips_per_class; ++c) {
      nn::Rng rng(nn::named_seed(spec.seed,
                                 "clip:" + std::to_string(k) + ":" + std::to_string(c)));
      Eigen::VectorXd samples = Eigen::VectorXd::Zero(audio::kClipSamples);
      add_prototype(samples, proto, 1.0, rng);

      data::ClipRecord rec;
      rec.labels.assign((size_t)spec.num_classes, 0);
      rec.labels[(size_t)k] = 1;

      // Polyphony: mix in one co-occurring class. Members of the confounded
      // pair never appear as secondaries so the pair stays a pure
      // audio-indistinguishable, GSC-separable contrast.
      if (rng.uniform() < spec.polyphony_prob && spec.num_classes > 3) {
        int other = k;
        while (other == k || other == spec.confounded_a || other == spec.confounded_b) {
          other = (int)rng.uniform_int(0, spec.num_classes - 1);
        }
        add_prototype(samples, spec.protos[(size_t)other], 0.7, rng);
        rec.labels[(size_t)other] = 1;
      }

      const double peak = samples.cwiseAbs().maxCoeff();
      if (peak > 0.9) samples *= 0.9 / peak;

      char name[64];
      std::snprintf(name, sizeof(name), "clip_%02d_%04d.wav", k, c);
      const fs::path wav_path = fs::path(out_dir) / "clips" / name;
      audio::write_wav(wav_path.string(), samples);

      rec.id = std::string(name, std::strlen(name) - 4);
      rec.audio_path = wav_path.string();
      rec.gsc_tags = proto.descriptors;
      world.records.push_back(std::move(rec));
    }
  }

  world.manifest_path = (fs::path(out_dir) / "manifest.jsonl").string();
  data::write_manifest(world.manifest_path, world.records);
  return world;
}

}  // namespace geoat::synth
