#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "geoat/errors.hpp"

namespace geoat::stats {

inline constexpr int8_t kMissing = -1;

/// Raters x items binary matrix; one item is one clip-by-event pair. Missing
/// entries are permitted and tracked as kMissing.
struct AnnotationMatrix {
  Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic> cells;
  std::vector<std::string> rater_ids;
  std::vector<std::string> item_ids;

  Eigen::Index raters() const { return cells.rows(); }
  Eigen::Index items() const { return cells.cols(); }
  void validate() const;  // R >= 2, entries in {0, 1, missing}

  /// CSV: header "rater,<item ids...>", one row per rater, empty cell (or
  /// "NA") = missing.
  static AnnotationMatrix read_csv(const std::string& path);
  void write_csv(const std::string& path) const;
};

struct ConsensusLabels {
  std::vector<int8_t> labels;
  double threshold = 0.5;
};

/// Per item: 1 iff positives >= ceil(threshold * rated), where raters with
/// missing entries reduce that item's denominator. With threshold 0.5 and 10
/// raters this is the >=5-of-10 rule.
ConsensusLabels majority_vote(const AnnotationMatrix& m, double threshold = 0.5);

struct AgreementResult {
  std::vector<double> per_rater;
  double mean = 0.0;
};

/// Per rater: fraction of items (missing excluded) where the rater equals the
/// consensus; mean over raters.
AgreementResult percent_agreement(const AnnotationMatrix& m, const ConsensusLabels& consensus);

struct AlphaResult {
  bool no_variation = false;  // only one value observed; alpha undefined
  double alpha = 0.0;
  double observed_disagreement = 0.0;
  double expected_disagreement = 0.0;
  Eigen::Index items_used = 0;
};

/// Krippendorff's alpha for nominal data via the coincidence matrix: items
/// with fewer than 2 ratings are excluded, pairable values weighted by
/// 1/(m_u - 1). Single observed value yields the tagged no-variation result
/// rather than a number. DegenerateData when fewer than 2 usable items.
AlphaResult krippendorff_alpha_nominal(const AnnotationMatrix& m);

struct WilcoxonResult {
  double w_plus = 0.0;
  double w_minus = 0.0;
  double w = 0.0;  // min(w_plus, w_minus)
  double p = 1.0;  // two-sided
  bool exact = false;
  int n_effective = 0;
};

/// Paired two-sided signed-rank test: zero differences dropped, midranks over
/// |d|. Exact p by full sign-assignment enumeration for n <= 25 (dynamic
/// programming over the rank-sum distribution), normal approximation with
/// continuity and tie corrections above. AllZeroDifferences when nothing
/// survives the zero drop.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

/// Welch two-sample t-test with Welch-Satterthwaite degrees of freedom.
/// DegenerateVariance when both samples have zero variance.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Survival function P(T > t) of Student's t distribution, evaluated through
/// the regularized incomplete beta function (continued fraction).
double student_t_sf(double t, double df);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace geoat::stats
