#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctm/ast.hpp"

namespace ctm {

enum class NodeKind { identifier, op, constant };

struct DepNode {
  NodeKind kind = NodeKind::constant;
  std::string text;  // identifier name, operator symbol or literal
  bool is_call = false;
  const Expr* origin = nullptr;

  /// Display form: calls get a `()` suffix, e.g. `getPath()`.
  std::string label() const { return is_call ? text + "()" : text; }
};

/// Data dependency graph of one expression. Edges run producer -> consumer.
struct DepGraph {
  std::vector<DepNode> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t top = 0;

  /// Nodes with an edge into `consumer`, in insertion order.
  std::vector<std::size_t> producers(std::size_t consumer) const;
};

/// One node per sub-expression occurrence, so the graph is a tree rooted at
/// `top`. Casts are transparent; `this`/`super` and lambdas become constant
/// nodes; conditionals feed both branches (not the condition) into a `?:`
/// operator node; array indexing is a `[]` operator node.
DepGraph build_dependency_graph(const Expr& expr);

struct RankedIdentifiers {
  std::set<std::string> primary;
  std::set<std::string> secondary;
  std::set<std::string> ternary;
};

/// Walks from the top against edge direction. Operator and constant nodes do
/// not consume a rank level. A text seen at several depths keeps the nearest.
RankedIdentifiers rank_identifiers(const DepGraph& g);

enum class SegmentationMode {
  literal,  // longest of [A-Z][a-z]+ and [A-Z]+ at each uppercase letter
  camel,    // an uppercase run before lowercase gives its last letter away
};

std::vector<std::string> segment_identifier(std::string_view name,
                                            SegmentationMode mode = SegmentationMode::literal);

struct FeatureVector {
  std::set<std::string> primary_first;
  std::set<std::string> primary_last;
  std::set<std::string> secondary_first;
  std::set<std::string> secondary_last;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector featurize(const RankedIdentifiers& ids,
                        SegmentationMode mode = SegmentationMode::literal);
FeatureVector featurize(const Expr& expr, SegmentationMode mode = SegmentationMode::literal);

}  // namespace ctm
