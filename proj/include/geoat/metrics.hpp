#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "geoat/errors.hpp"

namespace geoat::metrics {

using LabelMatrix = Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Non-interpolated average precision: sort by score descending, ties broken
/// by ascending original index, AP = mean over positives of
/// precision-at-that-rank. NoPositives when no positive labels.
double average_precision(std::span<const double> scores, std::span<const uint8_t> labels);

/// Mann-Whitney rank AUC with midrank tie correction:
/// (R+ - n+(n+1)/2) / (n+ n-). Degenerate when one class is absent.
double roc_auc(std::span<const double> scores, std::span<const uint8_t> labels);

/// Micro AUC over flattened clip x class pairs.
double roc_auc_micro(const Eigen::MatrixXd& scores, const LabelMatrix& labels);

struct MacroAuc {
  double value = 0.0;
  int skipped = 0;  // classes missing one of the two labels
};

/// Mean per-class AUC over classes with both labels present.
MacroAuc roc_auc_macro(const Eigen::MatrixXd& scores, const LabelMatrix& labels);

struct F1Result {
  double f1 = 0.0;
  bool degenerate = false;  // zero denominator convention: F1 = 0, flagged
};

/// Binarize sigmoid probabilities at `threshold`; F1 = 2TP/(2TP+FP+FN) over
/// all clip x class pairs.
F1Result f1_micro(const Eigen::MatrixXd& scores, const LabelMatrix& labels,
                  double threshold = 0.5);

struct EvalReport {
  std::vector<double> per_class_ap;  // NaN where undefined (no positives)
  std::vector<int> excluded_classes;
  double map = 0.0;
  double micro_auc = 0.0;
  double macro_auc = 0.0;
  int macro_skipped = 0;
  double micro_f1 = 0.0;
  bool f1_degenerate = false;
  double f1_threshold = 0.5;
  uint64_t seed = 0;
  std::string variant;

  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
  /// Flat CSV of per-class APs: class_index,ap (empty cell when undefined).
  std::string per_class_csv() const;
};

EvalReport compute_report(const Eigen::MatrixXd& scores, const LabelMatrix& labels,
                          double f1_threshold = 0.5);

enum class DeltaGroup { benefiting, neutral, nonbenefiting, undefined };

struct DeltaReport {
  std::vector<double> delta_ap;  // report_a minus report_b, per class
  std::vector<DeltaGroup> groups;
  int benefiting = 0, neutral = 0, nonbenefiting = 0, undefined = 0;
  std::string to_json() const;
};

/// Per-class AP difference a - b with the +-0.05 absolute grouping
/// (benefiting > +0.05, nonbenefiting < -0.05). ClassMismatch when the class
/// sets differ.
DeltaReport per_class_delta(const EvalReport& a, const EvalReport& b);

}  // namespace geoat::metrics
