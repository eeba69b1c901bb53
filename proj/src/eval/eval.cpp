#include "ctm/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "ctm/table.hpp"

namespace ctm {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pct(double v) { return fixed(100.0 * v, 1); }

RankedTexts rank(const std::map<std::string, std::size_t>& freq, std::size_t k) {
  RankedTexts out(freq.begin(), freq.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace

std::vector<Fold> lopo_folds(const std::vector<Occurrence>& occs,
                             const std::vector<std::string>& projects) {
  std::set<std::string> names(projects.begin(), projects.end());
  for (const auto& o : occs) names.insert(o.project);
  if (names.size() < 2) {
    throw EvaluationError("leave-one-project-out needs at least two projects, got " +
                          std::to_string(names.size()));
  }
  std::vector<Fold> folds;
  for (const auto& name : names) {
    Fold f;
    f.held_out = name;
    for (std::size_t i = 0; i < occs.size(); ++i) {
      (occs[i].project == name ? f.test : f.train).push_back(i);
    }
    f.empty_test = f.test.empty();
    folds.push_back(std::move(f));
  }
  return folds;
}

MetricsReport score(const std::vector<LabelPair>& pairs) {
  if (pairs.empty()) throw EvaluationError("cannot score an empty prediction list");
  MetricsReport r;
  r.total = pairs.size();
  std::array<std::size_t, kCTypeCount> tp{};
  for (const auto& [truth, pred] : pairs) {
    ++r.labels[index_of(truth)].support;
    ++r.labels[index_of(pred)].predicted;
    if (truth == pred) ++tp[index_of(truth)];
  }
  for (std::size_t i = 0; i < kCTypeCount; ++i) {
    LabelMetrics& m = r.labels[i];
    m.precision = ratio(tp[i], m.predicted);
    m.recall = ratio(tp[i], m.support);
    double s = m.precision + m.recall;
    m.f = s > 0 ? 2 * m.precision * m.recall / s : 0.0;
  }
  for (CType c : kAllCTypes) {
    const LabelMetrics& m = r[c];
    if (c == CType::OTHER || m.support == 0) continue;
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f += m.f;
    ++r.macro_labels;
  }
  if (r.macro_labels) {
    double n = static_cast<double>(r.macro_labels);
    r.macro_precision /= n;
    r.macro_recall /= n;
    r.macro_f /= n;
  }
  return r;
}

std::size_t ConfusionMatrix::row_sum(CType truth) const {
  std::size_t n = 0;
  for (auto v : counts[index_of(truth)]) n += v;
  return n;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (CType c : kAllCTypes) n += row_sum(c);
  return n;
}

ConfusionMatrix confusion(const std::vector<LabelPair>& pairs) {
  ConfusionMatrix m;
  for (const auto& [truth, pred] : pairs) ++m.counts[index_of(truth)][index_of(pred)];
  return m;
}

EvaluationResult evaluate_lopo(const std::vector<Occurrence>& occs, const EvalConfig& config,
                               const std::vector<std::string>& projects) {
  std::vector<Fold> folds = lopo_folds(occs, projects);
  std::vector<FeatureVector> features;
  features.reserve(occs.size());
  for (const auto& o : occs) features.push_back(featurize(o, config.mode));

  EvaluationResult result;
  for (const auto& fold : folds) {
    FoldOutcome out{fold.held_out, fold.train.size(), fold.test.size(), fold.empty_test, 0};
    if (!fold.train.empty() && !fold.test.empty()) {
      std::vector<Sample> train;
      train.reserve(fold.train.size());
      for (std::size_t i : fold.train) train.push_back(Sample{features[i], occs[i].label});
      DecisionTree tree = id3_train(train, config.learner);
      out.tree_leaves = tree.leaf_count();
      for (std::size_t i : fold.test)
        result.pairs.emplace_back(occs[i].label, classify(tree, features[i]));
    }
    result.folds.push_back(std::move(out));
  }
  if (result.pairs.empty()) throw EvaluationError("no fold produced predictions");
  result.metrics = score(result.pairs);
  result.matrix = confusion(result.pairs);
  return result;
}

TopExpressions report_top_expressions(const std::vector<Occurrence>& occs, CType label,
                                      std::size_t k) {
  std::map<std::string, std::size_t> overall;
  std::map<std::string, std::map<std::string, std::size_t>> per;
  for (const auto& o : occs) {
    if (o.label != label || !o.expr || is_constant_only(*o.expr)) continue;
    ++overall[o.expr_text];
    ++per[o.project][o.expr_text];
  }
  TopExpressions top;
  top.overall = rank(overall, k);
  for (const auto& [p, freq] : per) top.per_project[p] = rank(freq, k);
  return top;
}

std::size_t length_bucket(std::size_t components) {
  if (components <= 1) return 0;
  return std::min(components, kLengthBuckets) - 1;
}

std::array<double, kLengthBuckets> LengthHistogram::percent(CType label) const {
  std::array<double, kLengthBuckets> out{};
  auto it = counts.find(label);
  if (it == counts.end()) return out;
  std::size_t n = 0;
  for (auto v : it->second) n += v;
  for (std::size_t i = 0; i < kLengthBuckets; ++i) out[i] = 100.0 * ratio(it->second[i], n);
  return out;
}

LengthHistogram report_length_histogram(const std::vector<Occurrence>& occs) {
  LengthHistogram h;
  for (const auto& o : occs) {
    if (!o.expr) continue;
    auto [it, _] = h.counts.try_emplace(o.label, std::array<std::size_t, kLengthBuckets>{});
    ++it->second[length_bucket(component_count(*o.expr))];
  }
  return h;
}

namespace {

TextTable metrics_rows(const MetricsReport& m) {
  TextTable rows{{"ctype", "precision", "recall", "f", "support", "predicted"}};
  for (CType c : kAllCTypes) {
    const LabelMetrics& l = m[c];
    rows.push_back({std::string(to_string(c)), pct(l.precision), pct(l.recall), pct(l.f),
                    std::to_string(l.support), std::to_string(l.predicted)});
  }
  rows.push_back({"Average", pct(m.macro_precision), pct(m.macro_recall), pct(m.macro_f),
                  std::to_string(m.macro_labels) + " labels", std::to_string(m.total)});
  return rows;
}

TextTable confusion_rows(const ConfusionMatrix& c) {
  TextTable rows;
  std::vector<std::string> header{"truth\\pred"};
  for (CType p : kAllCTypes) header.emplace_back(to_string(p));
  rows.push_back(std::move(header));
  for (CType t : kAllCTypes) {
    std::vector<std::string> row{std::string(to_string(t))};
    for (CType p : kAllCTypes) row.push_back(std::to_string(c.at(t, p)));
    rows.push_back(std::move(row));
  }
  return rows;
}

TextTable histogram_rows(const LengthHistogram& h) {
  TextTable rows{{"ctype", "n=1", "n=2", "n=3", "n=4", "n=5", "n=6", "n>=7", "count"}};
  for (const auto& [label, counts] : h.counts) {
    std::vector<std::string> row{std::string(to_string(label))};
    for (double v : h.percent(label)) row.push_back(fixed(v, 1));
    std::size_t n = 0;
    for (auto v : counts) n += v;
    row.push_back(std::to_string(n));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_metrics_tsv(const MetricsReport& m) { return format_tsv(metrics_rows(m)); }
std::string format_metrics_text(const MetricsReport& m) { return format_aligned(metrics_rows(m)); }
std::string format_confusion_tsv(const ConfusionMatrix& c) { return format_tsv(confusion_rows(c)); }
std::string format_confusion_text(const ConfusionMatrix& c) {
  return format_aligned(confusion_rows(c));
}

std::string format_folds_tsv(const std::vector<FoldOutcome>& folds) {
  TextTable rows{{"held_out", "train", "test", "leaves", "flag"}};
  for (const auto& f : folds) {
    rows.push_back({f.held_out, std::to_string(f.train_size), std::to_string(f.test_size),
                    std::to_string(f.tree_leaves), f.empty_test ? "empty_test" : ""});
  }
  return format_tsv(rows);
}

std::string format_top_expressions_tsv(CType label, const TopExpressions& top) {
  TextTable rows{{"ctype", "scope", "rank", "count", "expression"}};
  std::string l(to_string(label));
  auto add = [&](const std::string& scope, const RankedTexts& texts) {
    for (std::size_t i = 0; i < texts.size(); ++i) {
      rows.push_back({l, scope, std::to_string(i + 1), std::to_string(texts[i].second),
                      texts[i].first});
    }
  };
  add("*", top.overall);
  for (const auto& [p, texts] : top.per_project) add(p, texts);
  return format_tsv(rows);
}

std::string format_histogram_tsv(const LengthHistogram& h) { return format_tsv(histogram_rows(h)); }
std::string format_histogram_text(const LengthHistogram& h) {
  return format_aligned(histogram_rows(h));
}

std::string format_top_words_tsv(CType label,
                                 const std::vector<std::pair<std::string, std::size_t>>& words) {
  TextTable rows{{"ctype", "rank", "projects", "word"}};
  for (std::size_t i = 0; i < words.size(); ++i) {
    rows.push_back({std::string(to_string(label)), std::to_string(i + 1),
                    std::to_string(words[i].second), words[i].first});
  }
  return format_tsv(rows);
}

}  // namespace ctm
