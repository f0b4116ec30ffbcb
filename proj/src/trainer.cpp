#include "geoat/trainer.hpp"

#include <cmath>
#include <sstream>

#include "geoat/rng.hpp"

namespace geoat::data {

void TrainConfig::validate() const {
  model.validate();
  if (lr <= 0.0) throw ConfigError("learning rate must be positive");
  if (max_epochs < 1 || patience < 1 || patience >= max_epochs) {
    throw ConfigError("need 1 <= patience < max_epochs");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

std::string TrainConfig::to_doc() const {
  std::ostringstream ss;
  ss << model.to_doc();
  ss << "lr = " << lr << "\n";
  ss << "weight_decay = " << weight_decay << "\n";
  ss << "max_epochs = " << max_epochs << "\n";
  ss << "patience = " << patience << "\n";
  ss << "batch_size = " << batch_size << "\n";
  ss << "seed = " << seed << "\n";
  ss << "f1_threshold = " << f1_threshold << "\n";
  return ss.str();
}

Eigen::VectorXd GscResolver::resolve(const ClipRecord& r) const {
  if (r.gsc_embedding_ref && clip_table != nullptr) {
    const float* row = clip_table->find(*r.gsc_embedding_ref);
    if (row == nullptr) {
      throw MissingEmbedding("clip table lacks key " + *r.gsc_embedding_ref);
    }
    Eigen::VectorXd v((Eigen::Index)clip_table->dim);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = (double)row[i];
    return v;
  }
  if (r.gsc_tags) {
    const gsc::GscEncoder enc = descriptor_table != nullptr
                                    ? gsc::GscEncoder::imported(*descriptor_table)
                                    : gsc::GscEncoder::hashed(hashed_dim);
    return gsc::encode_gsc_texts(*r.gsc_tags, enc).values;
  }
  throw MissingGsc("record " + r.id + " has no usable GSC source");
}

metrics::LabelMatrix PreparedDataset::label_matrix() const {
  metrics::LabelMatrix m((Eigen::Index)clips.size(), num_classes);
  for (size_t i = 0; i < clips.size(); ++i) {
    for (int c = 0; c < num_classes; ++c) {
      m((Eigen::Index)i, c) = clips[i].labels[c] > 0.5 ? 1 : 0;
    }
  }
  return m;
}

PreparedDataset prepare_dataset(const std::vector<ClipRecord>& records,
                                const nn::ModelConfig& model_cfg, const GscResolver& resolver,
                                const audio::MelConfig& mel_cfg) {
  PreparedDataset out;
  out.num_classes = model_cfg.num_classes;
  out.clips.reserve(records.size());
  for (const auto& r : records) {
    if ((int)r.labels.size() != model_cfg.num_classes) {
      throw ShapeMismatch("record " + r.id + " has " + std::to_string(r.labels.size()) +
                          " labels, model expects " + std::to_string(model_cfg.num_classes));
    }
    PreparedClip clip;
    clip.labels.resize(model_cfg.num_classes);
    for (int c = 0; c < model_cfg.num_classes; ++c) clip.labels[c] = (double)r.labels[(size_t)c];
    if (model_cfg.needs_audio()) {
      const audio::AudioClip wav = audio::load_wav(r.audio_path);
      clip.audio = nn::precompute_features(audio::logmel(wav, mel_cfg), model_cfg);
    }
    if (model_cfg.needs_gsc() || model_cfg.variant == nn::Variant::gsc_only) {
      clip.gsc = resolver.resolve(r);
      if (clip.gsc.size() != model_cfg.gsc_dim) {
        throw DimMismatch("record " + r.id + ": GSC dim " + std::to_string(clip.gsc.size()) +
                          " vs model " + std::to_string(model_cfg.gsc_dim));
      }
    }
    out.clips.push_back(std::move(clip));
  }
  return out;
}

Eigen::MatrixXd predict_scores(const nn::FusionModel& model, const PreparedDataset& dataset) {
  const int C = model.config().num_classes;
  Eigen::MatrixXd scores((Eigen::Index)dataset.clips.size(), C);
  for (size_t i = 0; i < dataset.clips.size(); ++i) {
    const PreparedClip& clip = dataset.clips[i];
    const Eigen::VectorXd z = model.predict_logits(
        model.config().needs_audio() ? &clip.audio : nullptr,
        clip.gsc.size() > 0 ? &clip.gsc : nullptr);
    for (int c = 0; c < C; ++c) {
      const double v = z[c];
      scores((Eigen::Index)i, c) =
          v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    }
  }
  return scores;
}

TrainResult train(const PreparedDataset& train_set, const PreparedDataset& val_set,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.clips.empty() || val_set.clips.empty()) {
    throw ConfigError("train and validation sets must be non-empty");
  }

  TrainResult result;
  result.model = std::make_unique<nn::FusionModel>(cfg.model, cfg.seed);
  nn::FusionModel& model = *result.model;

  nn::AdamWConfig opt_cfg;
  opt_cfg.lr = cfg.lr;
  opt_cfg.weight_decay = cfg.weight_decay;
  nn::AdamWState opt_state;

  nn::Rng shuffle_rng(nn::named_seed(cfg.seed, "epoch_shuffle"));
  std::vector<size_t> order(train_set.clips.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  const metrics::LabelMatrix val_labels = val_set.label_matrix();
  std::vector<nn::NamedTensor> best_params = model.params();
  double best_f1 = -1.0;
  int best_epoch = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;

    for (size_t at = 0; at < order.size(); at += (size_t)cfg.batch_size) {
      const size_t bsz = std::min((size_t)cfg.batch_size, order.size() - at);
      nn::Tape tape;
      const auto bound = model.bind(tape, /*trainable=*/true);

      std::vector<int> logit_rows;
      std::vector<int> label_rows;
      logit_rows.reserve(bsz);
      for (size_t k = 0; k < bsz; ++k) {
        const PreparedClip& clip = train_set.clips[order[at + k]];
        logit_rows.push_back(model.forward_logits(
            tape, bound, cfg.model.needs_audio() ? &clip.audio : nullptr,
            clip.gsc.size() > 0 ? &clip.gsc : nullptr));
        label_rows.push_back(tape.constant(nn::Tensor::row_vector(clip.labels)));
      }
      const int logits = bsz == 1 ? logit_rows[0] : tape.concat(logit_rows, 0);
      const int targets = bsz == 1 ? label_rows[0] : tape.concat(label_rows, 0);
      const int loss = tape.bce_with_logits(logits, targets);
      tape.backward(loss);
      loss_sum += tape.value(loss).data[0] * (double)bsz;

      std::vector<nn::Tensor*> params;
      std::vector<const nn::Tensor*> grads;
      params.reserve(bound.size());
      for (size_t i = 0; i < bound.size(); ++i) {
        params.push_back(&model.params()[i].value);
        grads.push_back(&tape.grad(bound[i]));
      }
      adamw_step(opt_state, opt_cfg, params, grads);
    }

    const Eigen::MatrixXd val_scores = predict_scores(model, val_set);
    const metrics::F1Result f1 = metrics::f1_micro(val_scores, val_labels, cfg.f1_threshold);

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / (double)train_set.clips.size();
    stats.val_f1 = f1.f1;
    result.history.push_back(stats);
    result.stopped_epoch = epoch;

    if (f1.f1 > best_f1) {
      best_f1 = f1.f1;
      best_epoch = epoch;
      best_params = model.params();
    } else if (epoch - best_epoch >= cfg.patience) {
      break;
    }
  }

  model.params() = best_params;
  result.best_epoch = best_epoch;
  result.best_val_f1 = best_f1;
  return result;
}

std::string TrainResult::history_csv() const {
  std::ostringstream ss;
  ss << "epoch,loss,val_f1\n";
  for (const auto& s : history) ss << s.epoch << "," << s.loss << "," << s.val_f1 << "\n";
  return ss.str();
}

}  // namespace geoat::data
