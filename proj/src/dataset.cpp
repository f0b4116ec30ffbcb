#include "geoat/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "geoat/rng.hpp"

namespace geoat::data {

using nlohmann::json;

std::vector<ClipRecord> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  std::vector<ClipRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("manifest " + path + " line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    ClipRecord r;
    try {
      r.id = doc.at("id").get<std::string>();
      r.audio_path = doc.value("audio", "");
      for (const auto& v : doc.at("labels")) {
        const int value = v.get<int>();
        if (value != 0 && value != 1) {
          throw ParseError("labels must be 0/1 in manifest line " + std::to_string(line_no));
        }
        r.labels.push_back((uint8_t)value);
      }
      if (doc.contains("lat") && doc.contains("lon")) {
        r.geo = geo::GeoPoint(doc.at("lat").get<double>(), doc.at("lon").get<double>());
      }
      if (doc.contains("gsc_tags")) {
        r.gsc_tags = doc.at("gsc_tags").get<std::vector<std::string>>();
      }
      if (doc.contains("gsc_embedding_ref")) {
        r.gsc_embedding_ref = doc.at("gsc_embedding_ref").get<std::string>();
      }
    } catch (const json::exception& e) {
      throw ParseError("manifest " + path + " line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    if (!records.empty() && records.front().labels.size() != r.labels.size()) {
      throw ParseError("manifest " + path + " line " + std::to_string(line_no) +
                       ": label count differs from earlier records");
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_manifest(const std::string& path, const std::vector<ClipRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path);
  for (const auto& r : records) {
    json doc{{"id", r.id}, {"labels", json::array()}};
    if (!r.audio_path.empty()) doc["audio"] = r.audio_path;
    for (auto v : r.labels) doc["labels"].push_back((int)v);
    if (r.geo) {
      doc["lat"] = r.geo->lat;
      doc["lon"] = r.geo->lon;
    }
    if (r.gsc_tags) doc["gsc_tags"] = *r.gsc_tags;
    if (r.gsc_embedding_ref) doc["gsc_embedding_ref"] = *r.gsc_embedding_ref;
    out << doc.dump() << "\n";
  }
}

int label_count(const std::vector<ClipRecord>& records) {
  if (records.empty()) throw ParseError("empty manifest");
  return (int)records.front().labels.size();
}

void SplitSpec::validate() const {
  const double sum = train_fraction + val_fraction + test_fraction;
  if (train_fraction <= 0 || val_fraction <= 0 || test_fraction <= 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be positive and sum to 1");
  }
}

SplitResult iterative_stratified_split(const std::vector<ClipRecord>& records,
                                       const SplitSpec& spec) {
  spec.validate();
  const size_t n = records.size();
  if (n == 0) throw InfeasibleSplit("cannot split an empty manifest");
  const int L = label_count(records);
  const double fractions[3] = {spec.train_fraction, spec.val_fraction, spec.test_fraction};

  SplitResult result;
  nn::Rng rng(nn::named_seed(spec.seed, "split"));

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  std::vector<long> label_total((size_t)L, 0);
  for (const auto& r : records) {
    for (int l = 0; l < L; ++l) label_total[(size_t)l] += r.labels[(size_t)l];
  }
  for (int l = 0; l < L; ++l) {
    if (label_total[(size_t)l] < 3) result.flagged_labels.push_back(l);
  }

  std::vector<double> desired(3);
  for (int j = 0; j < 3; ++j) desired[(size_t)j] = fractions[j] * (double)n;
  std::vector<std::array<double, 3>> desired_label((size_t)L);
  for (int l = 0; l < L; ++l) {
    for (int j = 0; j < 3; ++j) {
      desired_label[(size_t)l][(size_t)j] = fractions[j] * (double)label_total[(size_t)l];
    }
  }

  std::vector<int> assignment(n, -1);
  std::vector<long> remaining_pos((size_t)L, 0);
  for (int l = 0; l < L; ++l) remaining_pos[(size_t)l] = label_total[(size_t)l];
  size_t unassigned = n;

  // Greatest demand for the label, then greatest total remaining capacity,
  // then seed-keyed randomness.
  auto pick_subset = [&](int l) {
    constexpr double eps = 1e-12;
    std::vector<int> cand{0, 1, 2};
    if (l >= 0) {
      double best = -1e300;
      for (int j : cand) best = std::max(best, desired_label[(size_t)l][(size_t)j]);
      std::vector<int> keep;
      for (int j : cand) {
        if (desired_label[(size_t)l][(size_t)j] >= best - eps) keep.push_back(j);
      }
      cand = std::move(keep);
    }
    if (cand.size() > 1) {
      double best = -1e300;
      for (int j : cand) best = std::max(best, desired[(size_t)j]);
      std::vector<int> keep;
      for (int j : cand) {
        if (desired[(size_t)j] >= best - eps) keep.push_back(j);
      }
      cand = std::move(keep);
    }
    if (cand.size() == 1) return cand[0];
    return cand[(size_t)rng.uniform_int(0, (int64_t)cand.size() - 1)];
  };

  auto assign = [&](size_t idx, int j) {
    assignment[idx] = j;
    --unassigned;
    desired[(size_t)j] -= 1.0;
    for (int l = 0; l < L; ++l) {
      if (records[idx].labels[(size_t)l]) {
        desired_label[(size_t)l][(size_t)j] -= 1.0;
        --remaining_pos[(size_t)l];
      }
    }
  };

  while (unassigned > 0) {
    // Label with the fewest remaining unassigned positives.
    int target = -1;
    for (int l = 0; l < L; ++l) {
      if (remaining_pos[(size_t)l] <= 0) continue;
      if (target < 0 || remaining_pos[(size_t)l] < remaining_pos[(size_t)target]) target = l;
    }
    if (target < 0) break;  // only label-free clips remain
    for (size_t idx : order) {
      if (assignment[idx] >= 0 || !records[idx].labels[(size_t)target]) continue;
      assign(idx, pick_subset(target));
    }
  }
  for (size_t idx : order) {
    if (assignment[idx] < 0) assign(idx, pick_subset(-1));
  }

  // Repair: every label present in test when feasible.
  for (int l = 0; l < L; ++l) {
    if (label_total[(size_t)l] < 3) continue;
    long in_test = 0;
    for (size_t i = 0; i < n; ++i) {
      if (assignment[i] == 2 && records[i].labels[(size_t)l]) ++in_test;
    }
    if (in_test > 0) continue;
    for (int from : {0, 1}) {
      bool moved = false;
      for (size_t idx : order) {
        if (assignment[idx] == from && records[idx].labels[(size_t)l]) {
          assignment[idx] = 2;
          moved = true;
          break;
        }
      }
      if (moved) break;
    }
  }

  for (size_t i = 0; i < n; ++i) {
    if (assignment[i] == 0) result.train.push_back(i);
    else if (assignment[i] == 1) result.val.push_back(i);
    else result.test.push_back(i);
  }
  return result;
}

}  // namespace geoat::data
