#include "geoat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace geoat::stats {

void AnnotationMatrix::validate() const {
  if (raters() < 2) throw DegenerateData("annotation matrix needs at least 2 raters");
  for (Eigen::Index r = 0; r < raters(); ++r) {
    for (Eigen::Index i = 0; i < items(); ++i) {
      const int8_t v = cells(r, i);
      if (v != 0 && v != 1 && v != kMissing) {
        throw ParseError("annotation cell (" + std::to_string(r) + "," + std::to_string(i) +
                         ") is not 0/1/missing");
      }
    }
  }
}

AnnotationMatrix AnnotationMatrix::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty annotation CSV " + path);

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };

  AnnotationMatrix m;
  const auto header = split(line);
  if (header.size() < 2) throw ParseError("annotation CSV header needs item columns");
  m.item_ids.assign(header.begin() + 1, header.end());

  std::vector<std::vector<int8_t>> rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ParseError("annotation CSV row for '" + cells[0] + "' has " +
                       std::to_string(cells.size() - 1) + " cells, expected " +
                       std::to_string(m.item_ids.size()));
    }
    m.rater_ids.push_back(cells[0]);
    std::vector<int8_t> row;
    for (size_t i = 1; i < cells.size(); ++i) {
      const std::string& c = cells[i];
      if (c.empty() || c == "NA" || c == "na" || c == "-") {
        row.push_back(kMissing);
      } else if (c == "0") {
        row.push_back(0);
      } else if (c == "1") {
        row.push_back(1);
      } else {
        throw ParseError("annotation cell '" + c + "' is not 0/1/missing in " + path);
      }
    }
    rows.push_back(std::move(row));
  }

  m.cells.resize((Eigen::Index)rows.size(), (Eigen::Index)m.item_ids.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t i = 0; i < rows[r].size(); ++i) {
      m.cells((Eigen::Index)r, (Eigen::Index)i) = rows[r][i];
    }
  }
  m.validate();
  return m;
}

void AnnotationMatrix::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "rater";
  for (const auto& id : item_ids) out << "," << id;
  out << "\n";
  for (Eigen::Index r = 0; r < raters(); ++r) {
    out << (r < (Eigen::Index)rater_ids.size() ? rater_ids[(size_t)r]
                                               : "r" + std::to_string(r));
    for (Eigen::Index i = 0; i < items(); ++i) {
      out << ",";
      if (cells(r, i) != kMissing) out << (int)cells(r, i);
    }
    out << "\n";
  }
}

ConsensusLabels majority_vote(const AnnotationMatrix& m, double threshold) {
  ConsensusLabels out;
  out.threshold = threshold;
  out.labels.resize((size_t)m.items());
  for (Eigen::Index i = 0; i < m.items(); ++i) {
    long rated = 0, positive = 0;
    for (Eigen::Index r = 0; r < m.raters(); ++r) {
      if (m.cells(r, i) == kMissing) continue;
      ++rated;
      positive += m.cells(r, i);
    }
    if (rated == 0) {
      out.labels[(size_t)i] = 0;
      continue;
    }
    const long need = (long)std::ceil(threshold * (double)rated - 1e-9);
    out.labels[(size_t)i] = positive >= need ? 1 : 0;
  }
  return out;
}

AgreementResult percent_agreement(const AnnotationMatrix& m, const ConsensusLabels& consensus) {
  if (m.items() == 0) throw NoItems("annotation matrix has no items");
  if ((size_t)m.items() != consensus.labels.size()) {
    throw ShapeMismatch("consensus covers " + std::to_string(consensus.labels.size()) +
                        " items, matrix has " + std::to_string(m.items()));
  }
  AgreementResult out;
  double sum = 0.0;
  int counted = 0;
  for (Eigen::Index r = 0; r < m.raters(); ++r) {
    long rated = 0, agree = 0;
    for (Eigen::Index i = 0; i < m.items(); ++i) {
      if (m.cells(r, i) == kMissing) continue;
      ++rated;
      agree += m.cells(r, i) == consensus.labels[(size_t)i];
    }
    const double a = rated > 0 ? (double)agree / (double)rated
                               : std::numeric_limits<double>::quiet_NaN();
    out.per_rater.push_back(a);
    if (rated > 0) {
      sum += a;
      ++counted;
    }
  }
  if (counted == 0) throw NoItems("no rater has any rated item");
  out.mean = sum / (double)counted;
  return out;
}

AlphaResult krippendorff_alpha_nominal(const AnnotationMatrix& m) {
  m.validate();
  // Coincidence counts over the two nominal values.
  double o[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  Eigen::Index items_used = 0;
  for (Eigen::Index i = 0; i < m.items(); ++i) {
    int counts[2] = {0, 0};
    int m_u = 0;
    for (Eigen::Index r = 0; r < m.raters(); ++r) {
      const int8_t v = m.cells(r, i);
      if (v == kMissing) continue;
      ++counts[v];
      ++m_u;
    }
    if (m_u < 2) continue;
    ++items_used;
    const double w = 1.0 / (double)(m_u - 1);
    // Ordered pairs of distinct ratings within the item.
    o[0][0] += w * (double)counts[0] * (counts[0] - 1);
    o[1][1] += w * (double)counts[1] * (counts[1] - 1);
    o[0][1] += w * (double)counts[0] * counts[1];
    o[1][0] += w * (double)counts[1] * counts[0];
  }
  if (items_used < 2) {
    throw DegenerateData("alpha needs at least 2 items with at least 2 ratings each");
  }

  AlphaResult out;
  out.items_used = items_used;
  const double n0 = o[0][0] + o[0][1];
  const double n1 = o[1][0] + o[1][1];
  const double n = n0 + n1;
  if (n0 == 0.0 || n1 == 0.0) {
    out.no_variation = true;
    out.alpha = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.observed_disagreement = (o[0][1] + o[1][0]) / n;
  out.expected_disagreement = 1.0 - (n0 * (n0 - 1.0) + n1 * (n1 - 1.0)) / (n * (n - 1.0));
  out.alpha = 1.0 - out.observed_disagreement / out.expected_disagreement;
  return out;
}

namespace {

/// Midranks of |values|.
std::vector<double> midranks_abs(const std::vector<double>& d) {
  const size_t n = d.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
  std::vector<double> rank(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && std::abs(d[idx[j + 1]]) == std::abs(d[idx[i]])) ++j;
    const double mid = ((double)(i + 1) + (double)(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
    i = j + 1;
  }
  return rank;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeMismatch("wilcoxon: paired samples differ in length");
  std::vector<double> d;
  for (size_t i = 0; i < x.size(); ++i) {
    const double di = x[i] - y[i];
    if (di != 0.0) d.push_back(di);  // classical convention: zeros dropped
  }
  if (d.empty()) throw AllZeroDifferences("all paired differences are zero");

  const size_t n = d.size();
  const std::vector<double> rank = midranks_abs(d);

  WilcoxonResult out;
  out.n_effective = (int)n;
  for (size_t i = 0; i < n; ++i) {
    if (d[i] > 0.0) {
      out.w_plus += rank[i];
    } else {
      out.w_minus += rank[i];
    }
  }
  out.w = std::min(out.w_plus, out.w_minus);

  if (n <= 25) {
    // Exact distribution of W+ over all 2^n equally likely sign assignments.
    // Ranks doubled so midranks (.5 steps) become integers.
    std::vector<long> r2(n);
    long total = 0;
    for (size_t i = 0; i < n; ++i) {
      r2[i] = std::lround(2.0 * rank[i]);
      total += r2[i];
    }
    std::vector<double> count((size_t)total + 1, 0.0);
    count[0] = 1.0;
    long reach = 0;
    for (size_t i = 0; i < n; ++i) {
      reach += r2[i];
      for (long s = reach; s >= r2[i]; --s) {
        count[(size_t)s] += count[(size_t)(s - r2[i])];
      }
    }
    const double denom = std::pow(2.0, (double)n);
    const long w2 = std::lround(2.0 * out.w_plus);
    double p_le = 0.0, p_ge = 0.0;
    for (long s = 0; s <= total; ++s) {
      if (s <= w2) p_le += count[(size_t)s];
      if (s >= w2) p_ge += count[(size_t)s];
    }
    out.p = std::min(1.0, 2.0 * std::min(p_le, p_ge) / denom);
    out.exact = true;
    return out;
  }

  // Normal approximation with tie correction and continuity correction.
  const double nn = (double)n;
  const double mu = nn * (nn + 1.0) / 4.0;
  double tie_term = 0.0;
  {
    std::vector<double> a(n);
    for (size_t i = 0; i < n; ++i) a[i] = std::abs(d[i]);
    std::sort(a.begin(), a.end());
    size_t i = 0;
    while (i < n) {
      size_t j = i;
      while (j + 1 < n && a[j + 1] == a[i]) ++j;
      const double t = (double)(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double sigma2 = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  const double sigma = std::sqrt(sigma2);
  double z = 0.0;
  if (out.w_plus > mu) {
    z = (out.w_plus - mu - 0.5) / sigma;
  } else if (out.w_plus < mu) {
    z = (out.w_plus - mu + 0.5) / sigma;
  }
  out.p = std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
  out.exact = false;
  return out;
}

namespace {

/// Continued fraction for the regularized incomplete beta (Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_sf(double t, double df) {
  const double x = df / (df + t * t);
  const double tail = 0.5 * ibeta(df / 2.0, 0.5, x);
  return t >= 0.0 ? tail : 1.0 - tail;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / M_SQRT2); }

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  const size_t k = a.size(), m = b.size();
  if (k < 2 || m < 2) throw DegenerateData("welch_t_test needs at least 2 samples per group");
  auto mean_var = [](std::span<const double> s) {
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / (double)s.size();
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    var /= (double)(s.size() - 1);
    return std::pair<double, double>{mean, var};
  };
  const auto [ma, va] = mean_var(a);
  const auto [mb, vb] = mean_var(b);
  if (va == 0.0 && vb == 0.0) {
    throw DegenerateVariance("both samples have zero variance");
  }
  const double sa = va / (double)k, sb = vb / (double)m;
  WelchResult out;
  out.t = (ma - mb) / std::sqrt(sa + sb);
  out.df = (sa + sb) * (sa + sb) /
           (sa * sa / (double)(k - 1) + sb * sb / (double)(m - 1));
  out.p = std::min(1.0, 2.0 * student_t_sf(std::abs(out.t), out.df));
  return out;
}

}  // namespace geoat::stats
