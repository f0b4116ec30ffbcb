#include "geoat/zeroshot.hpp"

#include <cctype>
#include <fstream>

#include <nlohmann/json.hpp>

namespace geoat::zeroshot {

using nlohmann::json;

EmbeddingTable EmbeddingTable::from_file(const gsc::EmbeddingFile& file) {
  EmbeddingTable t;
  t.dim = (int)file.dim;
  for (size_t i = 0; i < file.keys.size(); ++i) {
    Eigen::VectorXd v((Eigen::Index)file.dim);
    const float* row = file.data.data() + i * file.dim;
    for (Eigen::Index d = 0; d < v.size(); ++d) v[d] = (double)row[d];
    if (v.norm() == 0.0) {
      throw DegenerateData("zero embedding vector for word '" + file.keys[i] + "'");
    }
    t.vectors.emplace(file.keys[i], std::move(v));
  }
  return t;
}

const Eigen::VectorXd* EmbeddingTable::find(const std::string& word) const {
  auto it = vectors.find(word);
  return it == vectors.end() ? nullptr : &it->second;
}

namespace {

std::vector<std::string> label_tokens(const std::string& label) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : label) {
    if (c == ' ' || c == '_' || c == '/' || c == '(' || c == ')') {
      if (!cur.empty()) {
        tokens.push_back(cur);
        cur.clear();
      }
    } else {
      cur += (char)std::tolower(c);
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

}  // namespace

Eigen::VectorXd label_embed(const std::string& label, const EmbeddingTable& table) {
  const auto tokens = label_tokens(label);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dim);
  int in_vocab = 0;
  for (const auto& tok : tokens) {
    if (const Eigen::VectorXd* v = table.find(tok)) {
      sum += *v;
      ++in_vocab;
    }
  }
  if (in_vocab == 0) {
    throw AllTokensOov("no in-vocabulary token in label '" + label + "'");
  }
  return sum / (double)in_vocab;
}

LabelMapping build_mapping(const std::vector<std::string>& source_labels,
                           const std::vector<std::string>& target_labels,
                           const EmbeddingTable& table, double tau) {
  std::vector<Eigen::VectorXd> target_vecs;
  target_vecs.reserve(target_labels.size());
  for (const auto& t : target_labels) target_vecs.push_back(label_embed(t, table));

  LabelMapping out;
  out.tau = tau;
  for (const auto& s : source_labels) {
    Eigen::VectorXd sv;
    try {
      sv = label_embed(s, table);
    } catch (const AllTokensOov&) {
      out.unassigned_sources.push_back(s);
      continue;
    }
    int best = -1;
    double best_sim = -2.0;
    for (size_t t = 0; t < target_vecs.size(); ++t) {
      const double sim = cosine(sv, target_vecs[t]);
      if (sim > best_sim) {  // strict: ties keep the earlier target
        best_sim = sim;
        best = (int)t;
      }
    }
    if (best >= 0 && best_sim >= tau) {
      out.assigned.push_back({s, target_labels[(size_t)best], best_sim});
    } else {
      out.unassigned_sources.push_back(s);
    }
  }
  return out;
}

MappedScores map_scores(const Eigen::VectorXd& source_scores,
                        const std::vector<std::string>& source_labels,
                        const std::vector<std::string>& target_labels,
                        const LabelMapping& mapping) {
  if ((size_t)source_scores.size() != source_labels.size()) {
    throw ShapeMismatch("score vector length " + std::to_string(source_scores.size()) +
                        " vs " + std::to_string(source_labels.size()) + " source labels");
  }
  std::unordered_map<std::string, size_t> source_index;
  for (size_t i = 0; i < source_labels.size(); ++i) source_index[source_labels[i]] = i;
  std::unordered_map<std::string, size_t> target_index;
  for (size_t i = 0; i < target_labels.size(); ++i) target_index[target_labels[i]] = i;

  MappedScores out;
  out.target_scores = Eigen::VectorXd::Zero((Eigen::Index)target_labels.size());
  std::vector<bool> covered(target_labels.size(), false);
  for (const auto& e : mapping.assigned) {
    const auto si = source_index.find(e.source);
    const auto ti = target_index.find(e.target);
    if (si == source_index.end() || ti == target_index.end()) continue;
    const double s = source_scores[(Eigen::Index)si->second];
    auto& cell = out.target_scores[(Eigen::Index)ti->second];
    cell = covered[ti->second] ? std::max(cell, s) : s;
    covered[ti->second] = true;
  }
  for (size_t t = 0; t < covered.size(); ++t) {
    if (!covered[t]) out.uncovered_targets.push_back((int)t);
  }
  return out;
}

LabelMapping LabelMapping::read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  LabelMapping m;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json doc = json::parse(line);
      if (doc.contains("target") && !doc.at("target").is_null()) {
        m.assigned.push_back({doc.at("source").get<std::string>(),
                              doc.at("target").get<std::string>(),
                              doc.value("similarity", 0.0)});
      } else {
        m.unassigned_sources.push_back(doc.at("source").get<std::string>());
      }
    } catch (const json::exception& e) {
      throw ParseError("mapping " + path + " line " + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
  return m;
}

void LabelMapping::write_jsonl(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& e : assigned) {
    out << json{{"source", e.source}, {"target", e.target}, {"similarity", e.similarity}}
               .dump()
        << "\n";
  }
  for (const auto& s : unassigned_sources) {
    out << json{{"source", s}, {"target", nullptr}}.dump() << "\n";
  }
}

}  // namespace geoat::zeroshot
