#include "geoat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace geoat::metrics {

using nlohmann::json;

double average_precision(std::span<const double> scores, std::span<const uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeMismatch("average_precision: " + std::to_string(scores.size()) +
                        " scores vs " + std::to_string(labels.size()) + " labels");
  }
  const size_t n = scores.size();
  long positives = 0;
  for (auto l : labels) positives += l;
  if (positives == 0) throw NoPositives("average_precision undefined without positives");

  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  double sum = 0.0;
  long hits = 0;
  for (size_t rank = 0; rank < n; ++rank) {
    if (labels[idx[rank]]) {
      ++hits;
      sum += (double)hits / (double)(rank + 1);
    }
  }
  return sum / (double)positives;
}

double roc_auc(std::span<const double> scores, std::span<const uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeMismatch("roc_auc: score/label length mismatch");
  }
  const size_t n = scores.size();
  long n_pos = 0;
  for (auto l : labels) n_pos += l;
  const long n_neg = (long)n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw DegenerateClass("roc_auc needs both classes present");
  }

  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Midranks over tied scores.
  std::vector<double> rank(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double mid = ((double)(i + 1) + (double)(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
    i = j + 1;
  }

  double r_pos = 0.0;
  for (size_t k = 0; k < n; ++k) {
    if (labels[k]) r_pos += rank[k];
  }
  return (r_pos - (double)n_pos * ((double)n_pos + 1.0) / 2.0) /
         ((double)n_pos * (double)n_neg);
}

double roc_auc_micro(const Eigen::MatrixXd& scores, const LabelMatrix& labels) {
  if (scores.rows() != labels.rows() || scores.cols() != labels.cols()) {
    throw ShapeMismatch("roc_auc_micro: score/label shape mismatch");
  }
  std::vector<double> s((size_t)scores.size());
  std::vector<uint8_t> l((size_t)labels.size());
  size_t k = 0;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    for (Eigen::Index c = 0; c < scores.cols(); ++c, ++k) {
      s[k] = scores(r, c);
      l[k] = labels(r, c);
    }
  }
  try {
    return roc_auc(s, l);
  } catch (const DegenerateClass&) {
    throw Degenerate("micro AUC undefined: flattened pairs are single-class");
  }
}

MacroAuc roc_auc_macro(const Eigen::MatrixXd& scores, const LabelMatrix& labels) {
  if (scores.rows() != labels.rows() || scores.cols() != labels.cols()) {
    throw ShapeMismatch("roc_auc_macro: score/label shape mismatch");
  }
  MacroAuc out;
  double sum = 0.0;
  int used = 0;
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    std::vector<double> s((size_t)scores.rows());
    std::vector<uint8_t> l((size_t)labels.rows());
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
      s[(size_t)r] = scores(r, c);
      l[(size_t)r] = labels(r, c);
    }
    try {
      sum += roc_auc(s, l);
      ++used;
    } catch (const DegenerateClass&) {
      ++out.skipped;
    }
  }
  if (used == 0) throw DegenerateClass("macro AUC: every class is single-label");
  out.value = sum / (double)used;
  return out;
}

F1Result f1_micro(const Eigen::MatrixXd& scores, const LabelMatrix& labels, double threshold) {
  if (scores.rows() != labels.rows() || scores.cols() != labels.cols()) {
    throw ShapeMismatch("f1_micro: score/label shape mismatch");
  }
  long tp = 0, fp = 0, fn = 0;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      const bool pred = scores(r, c) >= threshold;
      const bool truth = labels(r, c) != 0;
      tp += pred && truth;
      fp += pred && !truth;
      fn += !pred && truth;
    }
  }
  F1Result out;
  const long denom = 2 * tp + fp + fn;
  if (denom == 0) {
    out.degenerate = true;
    return out;
  }
  out.f1 = 2.0 * (double)tp / (double)denom;
  return out;
}

EvalReport compute_report(const Eigen::MatrixXd& scores, const LabelMatrix& labels,
                          double f1_threshold) {
  EvalReport rep;
  rep.f1_threshold = f1_threshold;
  const Eigen::Index C = scores.cols();
  rep.per_class_ap.assign((size_t)C, std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  int used = 0;
  for (Eigen::Index c = 0; c < C; ++c) {
    std::vector<double> s((size_t)scores.rows());
    std::vector<uint8_t> l((size_t)labels.rows());
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
      s[(size_t)r] = scores(r, c);
      l[(size_t)r] = labels(r, c);
    }
    try {
      rep.per_class_ap[(size_t)c] = average_precision(s, l);
      sum += rep.per_class_ap[(size_t)c];
      ++used;
    } catch (const NoPositives&) {
      rep.excluded_classes.push_back((int)c);
    }
  }
  if (used == 0) throw NoPositives("no class has a positive instance");
  rep.map = sum / (double)used;
  rep.micro_auc = roc_auc_micro(scores, labels);
  const MacroAuc macro = roc_auc_macro(scores, labels);
  rep.macro_auc = macro.value;
  rep.macro_skipped = macro.skipped;
  const F1Result f1 = f1_micro(scores, labels, f1_threshold);
  rep.micro_f1 = f1.f1;
  rep.f1_degenerate = f1.degenerate;
  return rep;
}

std::string EvalReport::to_json() const {
  json doc;
  doc["per_class_ap"] = json::array();
  for (double ap : per_class_ap) {
    if (std::isnan(ap)) {
      doc["per_class_ap"].push_back(nullptr);
    } else {
      doc["per_class_ap"].push_back(ap);
    }
  }
  doc["excluded_classes"] = excluded_classes;
  doc["map"] = map;
  doc["micro_auc"] = micro_auc;
  doc["macro_auc"] = macro_auc;
  doc["macro_skipped"] = macro_skipped;
  doc["micro_f1"] = micro_f1;
  doc["f1_degenerate"] = f1_degenerate;
  doc["f1_threshold"] = f1_threshold;
  doc["seed"] = seed;
  doc["variant"] = variant;
  return doc.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("bad report JSON: ") + e.what());
  }
  EvalReport rep;
  for (const auto& v : doc.at("per_class_ap")) {
    rep.per_class_ap.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                           : v.get<double>());
  }
  rep.excluded_classes = doc.value("excluded_classes", std::vector<int>{});
  rep.map = doc.at("map").get<double>();
  rep.micro_auc = doc.value("micro_auc", 0.0);
  rep.macro_auc = doc.value("macro_auc", 0.0);
  rep.macro_skipped = doc.value("macro_skipped", 0);
  rep.micro_f1 = doc.value("micro_f1", 0.0);
  rep.f1_degenerate = doc.value("f1_degenerate", false);
  rep.f1_threshold = doc.value("f1_threshold", 0.5);
  rep.seed = doc.value("seed", (uint64_t)0);
  rep.variant = doc.value("variant", "");
  return rep;
}

std::string EvalReport::per_class_csv() const {
  std::ostringstream ss;
  ss << "class,ap\n";
  for (size_t c = 0; c < per_class_ap.size(); ++c) {
    ss << c << ",";
    if (!std::isnan(per_class_ap[c])) ss << per_class_ap[c];
    ss << "\n";
  }
  return ss.str();
}

DeltaReport per_class_delta(const EvalReport& a, const EvalReport& b) {
  if (a.per_class_ap.size() != b.per_class_ap.size()) {
    throw ClassMismatch("reports cover " + std::to_string(a.per_class_ap.size()) + " vs " +
                        std::to_string(b.per_class_ap.size()) + " classes");
  }
  DeltaReport out;
  constexpr double kThreshold = 0.05;
  for (size_t c = 0; c < a.per_class_ap.size(); ++c) {
    const double da = a.per_class_ap[c];
    const double db = b.per_class_ap[c];
    if (std::isnan(da) || std::isnan(db)) {
      out.delta_ap.push_back(std::numeric_limits<double>::quiet_NaN());
      out.groups.push_back(DeltaGroup::undefined);
      ++out.undefined;
      continue;
    }
    const double d = da - db;
    out.delta_ap.push_back(d);
    if (d > kThreshold) {
      out.groups.push_back(DeltaGroup::benefiting);
      ++out.benefiting;
    } else if (d < -kThreshold) {
      out.groups.push_back(DeltaGroup::nonbenefiting);
      ++out.nonbenefiting;
    } else {
      out.groups.push_back(DeltaGroup::neutral);
      ++out.neutral;
    }
  }
  return out;
}

std::string DeltaReport::to_json() const {
  json doc;
  doc["delta_ap"] = json::array();
  for (double d : delta_ap) {
    if (std::isnan(d)) {
      doc["delta_ap"].push_back(nullptr);
    } else {
      doc["delta_ap"].push_back(d);
    }
  }
  doc["groups"] = json::array();
  for (DeltaGroup g : groups) {
    switch (g) {
      case DeltaGroup::benefiting: doc["groups"].push_back("benefiting"); break;
      case DeltaGroup::neutral: doc["groups"].push_back("neutral"); break;
      case DeltaGroup::nonbenefiting: doc["groups"].push_back("nonbenefiting"); break;
      case DeltaGroup::undefined: doc["groups"].push_back("undefined"); break;
    }
  }
  doc["benefiting"] = benefiting;
  doc["neutral"] = neutral;
  doc["nonbenefiting"] = nonbenefiting;
  doc["undefined"] = undefined;
  return doc.dump(2);
}

}  // namespace geoat::metrics
