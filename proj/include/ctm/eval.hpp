#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ctm/ctype.hpp"
#include "ctm/features.hpp"
#include "ctm/id3.hpp"
#include "ctm/occurrence.hpp"

namespace ctm {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Leave-one-project-out split, as indices into the occurrence list.
struct Fold {
  std::string held_out;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  bool empty_test = false;
};

/// One fold per project, in name order. `projects` adds names that may have
/// no occurrences; those folds get an empty, flagged test set. Throws
/// EvaluationError when fewer than two projects are known.
std::vector<Fold> lopo_folds(const std::vector<Occurrence>& occs,
                             const std::vector<std::string>& projects = {});

using LabelPair = std::pair<CType, CType>;  // (truth, prediction)

struct LabelMetrics {
  double precision = 0;
  double recall = 0;
  double f = 0;
  std::size_t support = 0;    // true count
  std::size_t predicted = 0;  // predicted count
};

struct MetricsReport {
  std::array<LabelMetrics, kCTypeCount> labels{};
  // Unweighted means over the non-OTHER labels with nonzero support.
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f = 0;
  std::size_t macro_labels = 0;
  std::size_t total = 0;

  const LabelMetrics& operator[](CType c) const { return labels[index_of(c)]; }
};

/// Throws EvaluationError on empty input.
MetricsReport score(const std::vector<LabelPair>& pairs);

struct ConfusionMatrix {
  std::array<std::array<std::size_t, kCTypeCount>, kCTypeCount> counts{};  // [truth][prediction]

  std::size_t at(CType truth, CType predicted) const {
    return counts[index_of(truth)][index_of(predicted)];
  }
  std::size_t row_sum(CType truth) const;
  std::size_t total() const;
};

ConfusionMatrix confusion(const std::vector<LabelPair>& pairs);

struct FoldOutcome {
  std::string held_out;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  bool empty_test = false;
  std::size_t tree_leaves = 0;
};

struct EvaluationResult {
  std::vector<FoldOutcome> folds;
  std::vector<LabelPair> pairs;  // pooled over folds, fold order then occurrence order
  MetricsReport metrics;
  ConfusionMatrix matrix;
};

struct EvalConfig {
  LearnerConfig learner;
  SegmentationMode mode = SegmentationMode::literal;
};

/// Trains one tree per fold on features recomputed from each expression and
/// scores the pooled test predictions.
EvaluationResult evaluate_lopo(const std::vector<Occurrence>& occs, const EvalConfig& config = {},
                               const std::vector<std::string>& projects = {});

using RankedTexts = std::vector<std::pair<std::string, std::size_t>>;

struct TopExpressions {
  RankedTexts overall;
  std::map<std::string, RankedTexts> per_project;
};

/// Distinct non-constant expression texts of a label, most frequent first,
/// ties alphabetical, at most k each.
TopExpressions report_top_expressions(const std::vector<Occurrence>& occs, CType label,
                                      std::size_t k);

inline constexpr std::size_t kLengthBuckets = 7;  // n = 1..6 and n >= 7

struct LengthHistogram {
  std::map<CType, std::array<std::size_t, kLengthBuckets>> counts;

  /// Percentages per bucket; all zero for an absent label.
  std::array<double, kLengthBuckets> percent(CType label) const;
};

/// Bucket index for a component count; counts below 1 go to the first bucket.
std::size_t length_bucket(std::size_t components);

LengthHistogram report_length_histogram(const std::vector<Occurrence>& occs);

std::string format_metrics_tsv(const MetricsReport& m);
std::string format_metrics_text(const MetricsReport& m);
std::string format_confusion_tsv(const ConfusionMatrix& c);
std::string format_confusion_text(const ConfusionMatrix& c);
std::string format_folds_tsv(const std::vector<FoldOutcome>& folds);
std::string format_top_expressions_tsv(CType label, const TopExpressions& top);
std::string format_histogram_tsv(const LengthHistogram& h);
std::string format_histogram_text(const LengthHistogram& h);
std::string format_top_words_tsv(CType label,
                                 const std::vector<std::pair<std::string, std::size_t>>& words);

}  // namespace ctm
