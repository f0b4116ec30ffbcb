#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "geoat/embedding_file.hpp"

namespace geoat::zeroshot {

/// Word -> embedding table of uniform dimension, loaded from an EmbeddingFile.
struct EmbeddingTable {
  int dim = 0;
  std::unordered_map<std::string, Eigen::VectorXd> vectors;

  static EmbeddingTable from_file(const gsc::EmbeddingFile& file);
  const Eigen::VectorXd* find(const std::string& word) const;
};

/// Lowercase, split on spaces/underscores/slashes/parentheses, average the
/// in-vocabulary token vectors. AllTokensOov when nothing resolves.
Eigen::VectorXd label_embed(const std::string& label, const EmbeddingTable& table);

struct LabelMapping {
  struct Entry {
    std::string source;
    std::string target;
    double similarity = 0.0;
  };
  std::vector<Entry> assigned;
  std::vector<std::string> unassigned_sources;
  double tau = 0.4;

  /// Line-delimited JSON: {"source":..., "target":..., "similarity":...}.
  static LabelMapping read_jsonl(const std::string& path);
  void write_jsonl(const std::string& path) const;
};

/// Each source label maps to its argmax-cosine target when the similarity
/// reaches tau, otherwise it stays unassigned (logged). Ties break by target
/// list order. OOV targets are fatal; OOV sources become unassigned.
LabelMapping build_mapping(const std::vector<std::string>& source_labels,
                           const std::vector<std::string>& target_labels,
                           const EmbeddingTable& table, double tau = 0.4);

struct MappedScores {
  Eigen::VectorXd target_scores;
  std::vector<int> uncovered_targets;  // targets with no assigned source
};

/// Target score = max over assigned sources' scores; uncovered targets score
/// 0 and are reported.
MappedScores map_scores(const Eigen::VectorXd& source_scores,
                        const std::vector<std::string>& source_labels,
                        const std::vector<std::string>& target_labels,
                        const LabelMapping& mapping);

}  // namespace geoat::zeroshot
