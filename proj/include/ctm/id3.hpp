#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctm/ctype.hpp"
#include "ctm/features.hpp"

namespace ctm {

enum class Feature { PrimaryFirstWords, PrimaryLastWords, SecondaryFirstWords, SecondaryLastWords };

inline constexpr std::array<Feature, 4> kAllFeatures = {
    Feature::PrimaryFirstWords, Feature::PrimaryLastWords, Feature::SecondaryFirstWords,
    Feature::SecondaryLastWords};

std::string_view to_string(Feature f);
std::optional<Feature> parse_feature(std::string_view s);
const std::set<std::string>& words_of(const FeatureVector& fv, Feature f);

struct Sample {
  FeatureVector features;
  CType label = CType::OTHER;
};

struct LearnerConfig {
  std::size_t min_items = 10;
};

struct SplitTest {
  Feature feature = Feature::PrimaryFirstWords;
  std::string word;

  friend bool operator==(const SplitTest&, const SplitTest&) = default;
};

/// Binary tree of word-membership tests. A node without children is a leaf.
struct DecisionTree {
  CType label = CType::OTHER;  // answer when this node is a leaf
  SplitTest test;
  std::unique_ptr<DecisionTree> present;
  std::unique_ptr<DecisionTree> absent;

  bool is_leaf() const { return !present; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  static DecisionTree leaf(CType label);
  static DecisionTree node(SplitTest test, DecisionTree present, DecisionTree absent);

  friend bool operator==(const DecisionTree& a, const DecisionTree& b);
};

/// Shannon entropy in bits of a label multiset. Throws on empty input.
double set_entropy(const std::vector<CType>& labels);

/// Size-weighted mean entropy of the non-empty sides. Throws when both are
/// empty.
double split_entropy(const std::vector<CType>& present, const std::vector<CType>& absent);

/// Lowest split entropy over every (feature, word) seen in the samples; ties
/// go to the earlier feature, then the smaller word. Nothing when no test is
/// strictly below the parent entropy.
std::optional<SplitTest> best_split(const std::vector<Sample>& samples);

/// Majority label; ties resolved by c-type declaration order.
CType majority_label(const std::vector<CType>& labels);

DecisionTree id3_train(const std::vector<Sample>& samples, const LearnerConfig& config = {});

CType classify(const DecisionTree& tree, const FeatureVector& fv);

/// if/elif rule text, e.g. `if "port" in PrimaryLastWords: ctype = PORT`.
std::string tree_to_rules(const DecisionTree& tree);
DecisionTree tree_from_rules(std::string_view text);

std::string tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(std::string_view text);

}  // namespace ctm
