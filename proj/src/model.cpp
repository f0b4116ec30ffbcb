#include "geoat/model.hpp"

#include <cmath>
#include <sstream>

#include "geoat/rng.hpp"

namespace geoat::nn {

std::string to_string(Backbone b) {
  return b == Backbone::mel_mlp ? "mel_mlp" : "patch_transformer";
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::audio_only: return "audio_only";
    case Variant::gsc_only: return "gsc_only";
    case Variant::early_channel: return "early_channel";
    case Variant::early_token: return "early_token";
    case Variant::inter: return "inter";
    case Variant::late: return "late";
  }
  return "audio_only";
}

Backbone backbone_from_string(const std::string& s) {
  if (s == "mel_mlp") return Backbone::mel_mlp;
  if (s == "patch_transformer") return Backbone::patch_transformer;
  throw ConfigError("unknown backbone: " + s);
}

Variant variant_from_string(const std::string& s) {
  for (Variant v : {Variant::audio_only, Variant::gsc_only, Variant::early_channel,
                    Variant::early_token, Variant::inter, Variant::late}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("unknown fusion variant: " + s);
}

void ModelConfig::validate() const {
  if (num_classes <= 0 || gsc_dim <= 0 || mel_bins <= 0 || frames <= 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (variant == Variant::early_token && backbone != Backbone::patch_transformer) {
    throw WrongBackbone("early_token fusion requires the patch_transformer backbone");
  }
  if (backbone == Backbone::patch_transformer) {
    if (d_model % heads != 0) throw ConfigError("d_model must be divisible by heads");
    if (frames < patch_t || mel_bins < patch_f) {
      throw ConfigError("input smaller than one patch");
    }
  }
  if (needs_gsc() || variant == Variant::gsc_only) {
    if (variant == Variant::inter && d_emb() % inter_heads != 0) {
      throw ConfigError("embedding dim must be divisible by inter_heads");
    }
  }
}

std::string ModelConfig::to_doc() const {
  std::ostringstream ss;
  ss << "variant = " << to_string(variant) << "\n";
  ss << "backbone = " << to_string(backbone) << "\n";
  ss << "num_classes = " << num_classes << "\n";
  ss << "gsc_dim = " << gsc_dim << "\n";
  ss << "mel_bins = " << mel_bins << "\n";
  ss << "frames = " << frames << "\n";
  ss << "mlp_hidden = " << mlp_hidden << "\n";
  ss << "mlp_emb = " << mlp_emb << "\n";
  ss << "patch_t = " << patch_t << "\n";
  ss << "patch_f = " << patch_f << "\n";
  ss << "d_model = " << d_model << "\n";
  ss << "enc_layers = " << enc_layers << "\n";
  ss << "heads = " << heads << "\n";
  ss << "gsc_head_hidden1 = " << gsc_head_hidden1 << "\n";
  ss << "gsc_head_hidden2 = " << gsc_head_hidden2 << "\n";
  ss << "gsc_embed_hidden = " << gsc_embed_hidden << "\n";
  ss << "inter_heads = " << inter_heads << "\n";
  ss << "lambda_raw_init = " << lambda_raw_init << "\n";
  return ss.str();
}

ModelConfig ModelConfig::from_doc(const std::string& doc) {
  ModelConfig cfg;
  std::istringstream in(doc);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    try {
      if (key == "variant") cfg.variant = variant_from_string(val);
      else if (key == "backbone") cfg.backbone = backbone_from_string(val);
      else if (key == "num_classes") cfg.num_classes = std::stoi(val);
      else if (key == "gsc_dim") cfg.gsc_dim = std::stoi(val);
      else if (key == "mel_bins") cfg.mel_bins = std::stoi(val);
      else if (key == "frames") cfg.frames = std::stoi(val);
      else if (key == "mlp_hidden") cfg.mlp_hidden = std::stoi(val);
      else if (key == "mlp_emb") cfg.mlp_emb = std::stoi(val);
      else if (key == "patch_t") cfg.patch_t = std::stoi(val);
      else if (key == "patch_f") cfg.patch_f = std::stoi(val);
      else if (key == "d_model") cfg.d_model = std::stoi(val);
      else if (key == "enc_layers") cfg.enc_layers = std::stoi(val);
      else if (key == "heads") cfg.heads = std::stoi(val);
      else if (key == "gsc_head_hidden1") cfg.gsc_head_hidden1 = std::stoi(val);
      else if (key == "gsc_head_hidden2") cfg.gsc_head_hidden2 = std::stoi(val);
      else if (key == "gsc_embed_hidden") cfg.gsc_embed_hidden = std::stoi(val);
      else if (key == "inter_heads") cfg.inter_heads = std::stoi(val);
      else if (key == "lambda_raw_init") cfg.lambda_raw_init = std::stod(val);
      else throw ConfigError("unknown model config key: " + key);
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad value for " + key + ": " + val);
    }
  }
  cfg.validate();
  return cfg;
}

AudioFeatures precompute_features(const audio::MelSpec& mel, const ModelConfig& cfg) {
  if (mel.num_bins() != cfg.mel_bins) {
    throw ShapeMismatch("spectrogram has " + std::to_string(mel.num_bins()) +
                        " mel bins, model expects " + std::to_string(cfg.mel_bins));
  }
  AudioFeatures f;
  f.pooled = mel.frames.colwise().mean();
  if (cfg.backbone == Backbone::patch_transformer) {
    if (mel.num_frames() != cfg.frames) {
      throw ShapeMismatch("spectrogram has " + std::to_string(mel.num_frames()) +
                          " frames, model expects " + std::to_string(cfg.frames));
    }
    const int rows = cfg.patches_per_frame_axis();
    const int cols = cfg.patches_per_bin_axis();
    f.patches.resize(rows * cols, cfg.patch_elems());
    for (int pr = 0; pr < rows; ++pr) {
      for (int pc = 0; pc < cols; ++pc) {
        const int p = pr * cols + pc;
        for (int dt = 0; dt < cfg.patch_t; ++dt) {
          for (int df = 0; df < cfg.patch_f; ++df) {
            f.patches(p, dt * cfg.patch_f + df) =
                mel.frames(pr * cfg.patch_t + dt, pc * cfg.patch_f + df);
          }
        }
      }
    }
  }
  return f;
}

namespace {

Tensor glorot(Eigen::Index in, Eigen::Index out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (double)(in + out));
  Tensor t = Tensor::zeros({in, out});
  for (Eigen::Index i = 0; i < t.numel(); ++i) t.data[i] = rng.uniform(-limit, limit);
  return t;
}

Tensor normal02(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Tensor t = Tensor::zeros({rows, cols});
  for (Eigen::Index i = 0; i < t.numel(); ++i) t.data[i] = 0.02 * rng.normal();
  return t;
}

}  // namespace

FusionModel::FusionModel(ModelConfig cfg, uint64_t seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  build_params(seed);
}

FusionModel::FusionModel(const Checkpoint& ckpt) : cfg_(ModelConfig::from_doc(ckpt.config_doc)) {
  build_params(0);
  for (auto& p : params_) {
    const NamedTensor* stored = ckpt.find(p.name);
    if (stored == nullptr) throw MissingField("checkpoint lacks parameter " + p.name);
    if (stored->value.shape != p.value.shape) {
      throw ShapeMismatch("checkpoint parameter " + p.name + " has shape " +
                          shape_str(stored->value.shape) + ", expected " +
                          shape_str(p.value.shape));
    }
    p.value = stored->value;
  }
}

void FusionModel::build_params(uint64_t seed) {
  params_.clear();
  index_.clear();
  auto add = [&](const std::string& name, Tensor t) {
    index_[name] = params_.size();
    params_.push_back({name, std::move(t)});
  };
  auto add_glorot = [&](const std::string& name, Eigen::Index in, Eigen::Index out) {
    Rng rng(named_seed(seed, name));
    add(name, glorot(in, out, rng));
  };
  auto add_zeros = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    add(name, Tensor::zeros({rows, cols}));
  };
  auto add_ones = [&](const std::string& name, Eigen::Index cols) {
    add(name, Tensor::full({1, cols}, 1.0));
  };
  auto add_normal = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    Rng rng(named_seed(seed, name));
    add(name, normal02(rows, cols, rng));
  };

  const int F = cfg_.mel_bins;
  const int C = cfg_.num_classes;
  const int G = cfg_.gsc_dim;
  const int E = cfg_.d_emb();

  if (cfg_.needs_audio()) {
    if (cfg_.backbone == Backbone::mel_mlp) {
      add_glorot("audio.l1.w", F, cfg_.mlp_hidden);
      add_zeros("audio.l1.b", 1, cfg_.mlp_hidden);
      add_glorot("audio.l2.w", cfg_.mlp_hidden, cfg_.mlp_emb);
      add_zeros("audio.l2.b", 1, cfg_.mlp_emb);
    } else {
      const int d = cfg_.d_model;
      const int P = cfg_.patch_elems();
      const int N = cfg_.n_patches();
      add_glorot("audio.patch.w", P, d);
      add_zeros("audio.patch.b", 1, d);
      add_normal("audio.cls", 1, d);
      add_normal("audio.pos", N + 1, d);
      for (int l = 0; l < cfg_.enc_layers; ++l) {
        const std::string pre = "enc." + std::to_string(l) + ".";
        add_ones(pre + "ln1.g", d);
        add_zeros(pre + "ln1.b", 1, d);
        add_glorot(pre + "wq", d, d);
        add_glorot(pre + "wk", d, d);
        add_glorot(pre + "wv", d, d);
        add_glorot(pre + "wo", d, d);
        add_ones(pre + "ln2.g", d);
        add_zeros(pre + "ln2.b", 1, d);
        add_glorot(pre + "ff1.w", d, 4 * d);
        add_zeros(pre + "ff1.b", 1, 4 * d);
        add_glorot(pre + "ff2.w", 4 * d, d);
        add_zeros(pre + "ff2.b", 1, d);
      }
      add_ones("audio.ln_f.g", d);
      add_zeros("audio.ln_f.b", 1, d);
    }
    add_glorot("head.w", E, C);
    add_zeros("head.b", 1, C);
  }

  if (cfg_.variant == Variant::early_channel) {
    // GSC pathway parameters are zero-initialized to preserve the audio
    // pathway at initialization.
    add_zeros("fuse.proj.w", G, F);
    if (cfg_.backbone == Backbone::mel_mlp) {
      add_zeros("fuse.l1.gsc_w", F, cfg_.mlp_hidden);
    } else {
      add_zeros("fuse.patch.gsc_w", cfg_.patch_elems(), cfg_.d_model);
    }
  }

  if (cfg_.variant == Variant::early_token) {
    add_glorot("fuse.gsc_tok.w", G, cfg_.d_model);
    add_zeros("fuse.gsc_pos", 1, cfg_.d_model);
    for (int l = 0; l < cfg_.enc_layers; ++l) {
      add_zeros("fuse.gate." + std::to_string(l), 1, cfg_.heads);
    }
  }

  if (cfg_.variant == Variant::gsc_only || cfg_.variant == Variant::late) {
    add_glorot("gsc.h1.w", G, cfg_.gsc_head_hidden1);
    add_zeros("gsc.h1.b", 1, cfg_.gsc_head_hidden1);
    add_glorot("gsc.h2.w", cfg_.gsc_head_hidden1, cfg_.gsc_head_hidden2);
    add_zeros("gsc.h2.b", 1, cfg_.gsc_head_hidden2);
    add_glorot("gsc.out.w", cfg_.gsc_head_hidden2, C);
    add_zeros("gsc.out.b", 1, C);
  }

  if (cfg_.variant == Variant::inter) {
    add_glorot("gsc_embed.l1.w", G, cfg_.gsc_embed_hidden);
    add_zeros("gsc_embed.l1.b", 1, cfg_.gsc_embed_hidden);
    add_glorot("gsc_embed.l2.w", cfg_.gsc_embed_hidden, E);
    add_zeros("gsc_embed.l2.b", 1, E);
    for (const char* dir : {"a2g", "g2a"}) {
      for (const char* w : {"wq", "wk", "wv"}) {
        add_glorot(std::string("inter.") + dir + "." + w, E, E);
      }
    }
    add_glorot("inter.fuse.w", 2 * E, E);
    add_zeros("inter.fuse.b", 1, E);
  }

  if (cfg_.variant == Variant::late) {
    add("late.lambda_raw", Tensor::full({1, C}, cfg_.lambda_raw_init));
  }
}

Eigen::Index FusionModel::num_parameters() const {
  Eigen::Index n = 0;
  for (const auto& p : params_) n += p.value.numel();
  return n;
}

Checkpoint FusionModel::to_checkpoint() const {
  Checkpoint c;
  c.config_doc = cfg_.to_doc();
  c.params = params_;
  return c;
}

std::vector<int> FusionModel::bind(Tape& tape, bool trainable) const {
  std::vector<int> ids;
  ids.reserve(params_.size());
  for (const auto& p : params_) {
    ids.push_back(trainable ? tape.param(p.value) : tape.constant(p.value));
  }
  return ids;
}

int FusionModel::param_id(const std::vector<int>& bound, const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw MissingField("model has no parameter " + name);
  return bound.at(it->second);
}

int FusionModel::classification_head(Tape& t, const std::vector<int>& b, int emb) const {
  return t.add(t.matmul(emb, param_id(b, "head.w")), param_id(b, "head.b"));
}

int FusionModel::gsc_class_logits(Tape& t, const std::vector<int>& b, int g) const {
  int h = t.relu(t.add(t.matmul(g, param_id(b, "gsc.h1.w")), param_id(b, "gsc.h1.b")));
  h = t.relu(t.add(t.matmul(h, param_id(b, "gsc.h2.w")), param_id(b, "gsc.h2.b")));
  return t.add(t.matmul(h, param_id(b, "gsc.out.w")), param_id(b, "gsc.out.b"));
}

int FusionModel::gsc_embedding(Tape& t, const std::vector<int>& b, int g) const {
  const int h =
      t.relu(t.add(t.matmul(g, param_id(b, "gsc_embed.l1.w")), param_id(b, "gsc_embed.l1.b")));
  return t.add(t.matmul(h, param_id(b, "gsc_embed.l2.w")), param_id(b, "gsc_embed.l2.b"));
}

int FusionModel::attention_block(Tape& t, int q_in, int kv_in, int wq, int wk, int wv,
                                 int n_heads) const {
  const int q = t.matmul(q_in, wq);
  const int k = t.matmul(kv_in, wk);
  const int v = t.matmul(kv_in, wv);
  const Eigen::Index dim = t.value(q).cols();
  const Eigen::Index dh = dim / n_heads;
  std::vector<int> parts;
  for (int h = 0; h < n_heads; ++h) {
    const int qh = t.slice(q, 1, h * dh, dh);
    const int kh = t.slice(k, 1, h * dh, dh);
    const int vh = t.slice(v, 1, h * dh, dh);
    const int sc = t.scale(t.matmul(qh, t.transpose(kh)), 1.0 / std::sqrt((double)dh));
    parts.push_back(t.matmul(t.softmax_last(sc), vh));
  }
  return parts.size() == 1 ? parts[0] : t.concat(parts, 1);
}

int FusionModel::cross_modal_fusion(Tape& t, const std::vector<int>& b, int e_audio,
                                    int e_gsc) const {
  const int att_a = attention_block(t, e_audio, e_gsc, param_id(b, "inter.a2g.wq"),
                                    param_id(b, "inter.a2g.wk"), param_id(b, "inter.a2g.wv"),
                                    cfg_.inter_heads);
  const int att_g = attention_block(t, e_gsc, e_audio, param_id(b, "inter.g2a.wq"),
                                    param_id(b, "inter.g2a.wk"), param_id(b, "inter.g2a.wv"),
                                    cfg_.inter_heads);
  const int refined_a = t.add(e_audio, att_a);
  const int refined_g = t.add(e_gsc, att_g);
  const int stream1 = t.add(refined_a, e_gsc);
  const int stream2 = t.add(refined_g, e_audio);
  const std::vector<int> streams{stream1, stream2};
  const int fused = t.concat(streams, 1);
  return t.add(t.matmul(fused, param_id(b, "inter.fuse.w")), param_id(b, "inter.fuse.b"));
}

int FusionModel::mel_mlp_embedding(Tape& t, const std::vector<int>& b, const AudioFeatures& a,
                                   int gsc_proj) const {
  if (a.pooled.size() != cfg_.mel_bins) {
    throw ShapeMismatch("pooled feature length " + std::to_string(a.pooled.size()) +
                        " vs mel_bins " + std::to_string(cfg_.mel_bins));
  }
  const int x = t.constant(Tensor::row_vector(a.pooled));
  int h = t.matmul(x, param_id(b, "audio.l1.w"));
  if (gsc_proj >= 0) {
    h = t.add(h, t.matmul(gsc_proj, param_id(b, "fuse.l1.gsc_w")));
  }
  h = t.relu(t.add(h, param_id(b, "audio.l1.b")));
  return t.relu(t.add(t.matmul(h, param_id(b, "audio.l2.w")), param_id(b, "audio.l2.b")));
}

int FusionModel::transformer_cls(Tape& t, const std::vector<int>& b, const AudioFeatures& a,
                                 int gsc_proj, int gsc_token) const {
  const int d = cfg_.d_model;
  const int N = cfg_.n_patches();
  const int dh = d / cfg_.heads;
  if (a.patches.rows() != N || a.patches.cols() != cfg_.patch_elems()) {
    throw ShapeMismatch("patch matrix is " + std::to_string(a.patches.rows()) + "x" +
                        std::to_string(a.patches.cols()) + ", expected " + std::to_string(N) +
                        "x" + std::to_string(cfg_.patch_elems()));
  }

  const int patches = t.constant(Tensor::from_matrix(a.patches));
  int tok = t.matmul(patches, param_id(b, "audio.patch.w"));
  if (gsc_proj >= 0) {
    // Channel-fused patches: the GSC channel of patch (pr, pc) repeats the
    // projected vector g' along time, so it is a gather from g'.
    std::vector<Eigen::Index> idx;
    idx.reserve((size_t)N * cfg_.patch_elems());
    const int cols = cfg_.patches_per_bin_axis();
    for (int p = 0; p < N; ++p) {
      const int pc = p % cols;
      for (int dt = 0; dt < cfg_.patch_t; ++dt) {
        for (int df = 0; df < cfg_.patch_f; ++df) {
          idx.push_back(pc * cfg_.patch_f + df);
        }
      }
    }
    const int gsc_patches = t.gather(gsc_proj, std::move(idx), {N, cfg_.patch_elems()});
    tok = t.add(tok, t.matmul(gsc_patches, param_id(b, "fuse.patch.gsc_w")));
  }
  tok = t.add(tok, param_id(b, "audio.patch.b"));

  const bool has_gsc_tok = gsc_token >= 0;
  std::vector<int> seq_parts{param_id(b, "audio.cls")};
  if (has_gsc_tok) seq_parts.push_back(gsc_token);
  seq_parts.push_back(tok);
  int x = t.concat(seq_parts, 0);
  const Eigen::Index S = t.value(x).rows();

  const int pos = param_id(b, "audio.pos");
  int pos_full = pos;
  if (has_gsc_tok) {
    const std::vector<int> rows{t.slice(pos, 0, 0, 1), param_id(b, "fuse.gsc_pos"),
                                t.slice(pos, 0, 1, N)};
    pos_full = t.concat(rows, 0);
  }
  x = t.add(x, pos_full);

  auto affine_ln = [&](int v, const std::string& g_name, const std::string& b_name) {
    return t.add(t.mul(t.layer_norm_last(v), param_id(b, g_name)), param_id(b, b_name));
  };
  auto drop_gsc_row = [&](int v) {
    const std::vector<int> parts{t.slice(v, 0, 0, 1), t.slice(v, 0, 2, S - 2)};
    return t.concat(parts, 0);
  };

  for (int l = 0; l < cfg_.enc_layers; ++l) {
    const std::string pre = "enc." + std::to_string(l) + ".";
    const int xn = affine_ln(x, pre + "ln1.g", pre + "ln1.b");
    const int q = t.matmul(xn, param_id(b, pre + "wq"));
    const int k = t.matmul(xn, param_id(b, pre + "wk"));
    const int v = t.matmul(xn, param_id(b, pre + "wv"));

    int k_keys = k, v_keys = v, v_gsc = -1, gate = -1;
    if (has_gsc_tok) {
      // The [GSC] token is excluded from the shared softmax; its value enters
      // through a zero-initialized per-head gate so the audio pathway is
      // bit-identical to the audio-only model at initialization.
      k_keys = drop_gsc_row(k);
      v_keys = drop_gsc_row(v);
      v_gsc = t.slice(v, 0, 1, 1);
      gate = param_id(b, "fuse.gate." + std::to_string(l));
    }

    std::vector<int> head_outs;
    for (int h = 0; h < cfg_.heads; ++h) {
      const int qh = t.slice(q, 1, (Eigen::Index)h * dh, dh);
      const int kh = t.slice(k_keys, 1, (Eigen::Index)h * dh, dh);
      const int vh = t.slice(v_keys, 1, (Eigen::Index)h * dh, dh);
      const int sc = t.scale(t.matmul(qh, t.transpose(kh)), 1.0 / std::sqrt((double)dh));
      int oh = t.matmul(t.softmax_last(sc), vh);
      if (has_gsc_tok) {
        const int vgh = t.slice(v_gsc, 1, (Eigen::Index)h * dh, dh);
        const int gh = t.slice(gate, 1, h, 1);
        oh = t.add(oh, t.mul(vgh, gh));
      }
      head_outs.push_back(oh);
    }
    const int attn = t.matmul(head_outs.size() == 1 ? head_outs[0] : t.concat(head_outs, 1),
                              param_id(b, pre + "wo"));
    x = t.add(x, attn);

    const int xn2 = affine_ln(x, pre + "ln2.g", pre + "ln2.b");
    int ff = t.relu(t.add(t.matmul(xn2, param_id(b, pre + "ff1.w")), param_id(b, pre + "ff1.b")));
    ff = t.add(t.matmul(ff, param_id(b, pre + "ff2.w")), param_id(b, pre + "ff2.b"));
    x = t.add(x, ff);
  }

  x = affine_ln(x, "audio.ln_f.g", "audio.ln_f.b");
  return t.slice(x, 0, 0, 1);
}

int FusionModel::audio_embedding(Tape& t, const std::vector<int>& b, const AudioFeatures& a,
                                 int gsc_proj) const {
  if (cfg_.backbone == Backbone::mel_mlp) {
    return mel_mlp_embedding(t, b, a, gsc_proj);
  }
  return transformer_cls(t, b, a, gsc_proj, /*gsc_token=*/-1);
}

int FusionModel::forward_logits(Tape& t, const std::vector<int>& bound,
                                const AudioFeatures* audio, const Eigen::VectorXd* gsc) const {
  if (cfg_.needs_audio() && audio == nullptr) {
    throw ShapeMismatch("variant " + to_string(cfg_.variant) + " requires audio features");
  }
  int g = -1;
  if (cfg_.needs_gsc() || cfg_.variant == Variant::gsc_only) {
    if (gsc == nullptr) {
      throw MissingGsc("variant " + to_string(cfg_.variant) + " requires a GSC vector");
    }
    if (gsc->size() != cfg_.gsc_dim) {
      throw DimMismatch("GSC vector length " + std::to_string(gsc->size()) +
                        " vs configured dim " + std::to_string(cfg_.gsc_dim));
    }
    g = t.constant(Tensor::row_vector(*gsc));
  }

  switch (cfg_.variant) {
    case Variant::audio_only:
      return classification_head(t, bound, audio_embedding(t, bound, *audio, -1));
    case Variant::gsc_only:
      return gsc_class_logits(t, bound, g);
    case Variant::early_channel: {
      const int g_proj = t.matmul(g, param_id(bound, "fuse.proj.w"));
      return classification_head(t, bound, audio_embedding(t, bound, *audio, g_proj));
    }
    case Variant::early_token: {
      const int token = t.matmul(g, param_id(bound, "fuse.gsc_tok.w"));
      const int cls = transformer_cls(t, bound, *audio, -1, token);
      return classification_head(t, bound, cls);
    }
    case Variant::inter: {
      const int e_audio = audio_embedding(t, bound, *audio, -1);
      const int e_gsc = gsc_embedding(t, bound, g);
      return classification_head(t, bound, cross_modal_fusion(t, bound, e_audio, e_gsc));
    }
    case Variant::late: {
      const int z_audio = classification_head(t, bound, audio_embedding(t, bound, *audio, -1));
      const int z_gsc = gsc_class_logits(t, bound, g);
      const int lambda = t.softplus(param_id(bound, "late.lambda_raw"));
      return t.add(z_audio, t.mul(lambda, z_gsc));
    }
  }
  throw ConfigError("unhandled variant");
}

Eigen::VectorXd FusionModel::predict_logits(const AudioFeatures* audio,
                                            const Eigen::VectorXd* gsc) const {
  Tape t;
  const auto bound = bind(t, /*trainable=*/false);
  const int z = forward_logits(t, bound, audio, gsc);
  return t.value(z).vec();
}

}  // namespace geoat::nn
