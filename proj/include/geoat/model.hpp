#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geoat/checkpoint.hpp"
#include "geoat/gsc.hpp"
#include "geoat/melspec.hpp"
#include "geoat/tape.hpp"

namespace geoat::nn {

enum class Backbone { mel_mlp, patch_transformer };
enum class Variant { audio_only, gsc_only, early_channel, early_token, inter, late };

std::string to_string(Backbone b);
std::string to_string(Variant v);
Backbone backbone_from_string(const std::string& s);
Variant variant_from_string(const std::string& s);

struct ModelConfig {
  Variant variant = Variant::audio_only;
  Backbone backbone = Backbone::mel_mlp;
  int num_classes = 28;
  int gsc_dim = gsc::kDefaultGscDim;
  int mel_bins = 64;
  int frames = 997;

  // MelMLP backbone: pooled frequency profile -> hidden -> embedding.
  int mlp_hidden = 512;
  int mlp_emb = 256;

  // Patch-transformer backbone.
  int patch_t = 16;
  int patch_f = 16;
  int d_model = 128;
  int enc_layers = 2;
  int heads = 4;

  // GSC classification head (gsc_only baseline and the late-fusion branch).
  int gsc_head_hidden1 = 1024;
  int gsc_head_hidden2 = 512;

  // GSC embedding MLP for intermediate fusion.
  int gsc_embed_hidden = 256;
  int inter_heads = 1;

  double lambda_raw_init = 0.0;  // late fusion; softplus(0) = ln 2

  int patches_per_frame_axis() const { return frames / patch_t; }
  int patches_per_bin_axis() const { return mel_bins / patch_f; }
  int n_patches() const { return patches_per_frame_axis() * patches_per_bin_axis(); }
  int patch_elems() const { return patch_t * patch_f; }
  int d_emb() const { return backbone == Backbone::mel_mlp ? mlp_emb : d_model; }
  bool needs_audio() const { return variant != Variant::gsc_only; }
  bool needs_gsc() const {
    return variant != Variant::audio_only && variant != Variant::gsc_only;
  }

  void validate() const;
  std::string to_doc() const;
  static ModelConfig from_doc(const std::string& doc);
};

/// Per-clip audio features derived once from a MelSpec.
struct AudioFeatures {
  Eigen::VectorXd pooled;   // mean over time per mel bin (F)
  Eigen::MatrixXd patches;  // N x (patch_t*patch_f), row-major within a patch
};

AudioFeatures precompute_features(const audio::MelSpec& mel, const ModelConfig& cfg);

/// One fusion model: named parameters plus a graph-building forward.
class FusionModel {
 public:
  FusionModel(ModelConfig cfg, uint64_t seed);
  explicit FusionModel(const Checkpoint& ckpt);

  const ModelConfig& config() const { return cfg_; }
  std::vector<NamedTensor>& params() { return params_; }
  const std::vector<NamedTensor>& params() const { return params_; }
  Eigen::Index num_parameters() const;

  Checkpoint to_checkpoint() const;

  /// Bind every parameter onto the tape (trainable: param nodes; otherwise
  /// constants). Returned ids align with params().
  std::vector<int> bind(Tape& tape, bool trainable) const;

  /// Build the forward graph for one clip; returns the (1 x C) logits node.
  /// `gsc` may be nullptr for variants that do not consume it (MissingGsc
  /// otherwise).
  int forward_logits(Tape& tape, const std::vector<int>& bound, const AudioFeatures* audio,
                     const Eigen::VectorXd* gsc) const;

  /// Convenience inference path on a private tape.
  Eigen::VectorXd predict_logits(const AudioFeatures* audio, const Eigen::VectorXd* gsc) const;

 private:
  int param_id(const std::vector<int>& bound, const std::string& name) const;
  void build_params(uint64_t seed);

  // Sub-graphs; each returns a node id.
  int audio_embedding(Tape& t, const std::vector<int>& b, const AudioFeatures& a,
                      int gsc_node) const;  // gsc_node < 0 unless early fusion
  int mel_mlp_embedding(Tape& t, const std::vector<int>& b, const AudioFeatures& a,
                        int gsc_proj) const;
  int transformer_cls(Tape& t, const std::vector<int>& b, const AudioFeatures& a,
                      int gsc_proj, int gsc_token) const;
  int gsc_class_logits(Tape& t, const std::vector<int>& b, int g) const;
  int gsc_embedding(Tape& t, const std::vector<int>& b, int g) const;
  int cross_modal_fusion(Tape& t, const std::vector<int>& b, int e_audio, int e_gsc) const;
  int attention_block(Tape& t, int q_in, int kv_in, int wq, int wk, int wv, int n_heads) const;
  int classification_head(Tape& t, const std::vector<int>& b, int emb) const;

  ModelConfig cfg_;
  std::vector<NamedTensor> params_;
  std::unordered_map<std::string, size_t> index_;
};

}  // namespace geoat::nn
