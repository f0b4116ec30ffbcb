#pragma once

#include <memory>
#include <string>
#include <vector>

#include "geoat/dataset.hpp"
#include "geoat/gsc.hpp"
#include "geoat/metrics.hpp"
#include "geoat/model.hpp"
#include "geoat/optim.hpp"

namespace geoat::data {

struct TrainConfig {
  nn::ModelConfig model;
  double lr = 1e-3;  // scratch mode; fine-tune mode uses 1e-5
  double weight_decay = 0.0;
  int max_epochs = 100;
  int patience = 15;
  int batch_size = 32;
  uint64_t seed = 0;
  double f1_threshold = 0.5;

  void validate() const;
  std::string to_doc() const;
};

/// Resolves a record's GSC vector: clip-keyed embedding table via
/// gsc_embedding_ref, otherwise gsc_tags through the configured encoder
/// (imported descriptor table or deterministic hashing).
struct GscResolver {
  const gsc::EmbeddingFile* clip_table = nullptr;
  const gsc::EmbeddingFile* descriptor_table = nullptr;
  int hashed_dim = gsc::kDefaultGscDim;

  Eigen::VectorXd resolve(const ClipRecord& r) const;
};

struct PreparedClip {
  nn::AudioFeatures audio;
  Eigen::VectorXd gsc;
  Eigen::VectorXd labels;  // 0/1 as double, for the BCE target
};

struct PreparedDataset {
  std::vector<PreparedClip> clips;
  int num_classes = 0;

  metrics::LabelMatrix label_matrix() const;
};

/// Loads audio (when the variant needs it) and resolves GSC vectors (when the
/// variant needs them; MissingGsc on records without a source).
PreparedDataset prepare_dataset(const std::vector<ClipRecord>& records,
                                const nn::ModelConfig& model_cfg, const GscResolver& resolver,
                                const audio::MelConfig& mel_cfg = {});

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double val_f1 = 0.0;
};

struct TrainResult {
  std::unique_ptr<nn::FusionModel> model;  // best-validation-F1 parameters
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_val_f1 = 0.0;
  int stopped_epoch = 0;

  std::string history_csv() const;  // epoch, loss, val_f1
};

/// Mini-batch AdamW on BCE over fused logits with early stopping on
/// validation micro-F1. Deterministic given (config, data).
TrainResult train(const PreparedDataset& train_set, const PreparedDataset& val_set,
                  const TrainConfig& cfg);

/// Sigmoid probabilities, one row per clip.
Eigen::MatrixXd predict_scores(const nn::FusionModel& model, const PreparedDataset& dataset);

}  // namespace geoat::data
