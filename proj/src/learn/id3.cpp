#include "ctm/id3.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ctm {
namespace {

using Counts = std::array<std::size_t, kCTypeCount>;

// Split entropies closer than this count as equal, so floating-point noise
// cannot override the tie-break order.
constexpr double kEntropyEpsilon = 1e-12;

constexpr std::array<std::string_view, 4> kFeatureNames = {
    "PrimaryFirstWords", "PrimaryLastWords", "SecondaryFirstWords", "SecondaryLastWords"};

double entropy_of(const Counts& c) {
  std::size_t n = 0;
  for (auto v : c) n += v;
  if (n == 0) return 0.0;
  double h = 0.0;
  for (auto v : c) {
    if (v == 0) continue;
    double p = static_cast<double>(v) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

std::size_t total(const Counts& c) {
  std::size_t n = 0;
  for (auto v : c) n += v;
  return n;
}

double split_entropy_of(const Counts& a, const Counts& b) {
  double na = static_cast<double>(total(a)), nb = static_cast<double>(total(b));
  return (na * entropy_of(a) + nb * entropy_of(b)) / (na + nb);
}

Counts count_labels(const std::vector<const Sample*>& items) {
  Counts c{};
  for (const Sample* s : items) ++c[index_of(s->label)];
  return c;
}

CType majority_of(const Counts& c) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (c[i] > c[best]) best = i;
  }
  return kAllCTypes[best];
}

std::optional<SplitTest> best_split_of(const std::vector<const Sample*>& items) {
  Counts all = count_labels(items);
  double parent = entropy_of(all);
  std::array<std::map<std::string, Counts>, 4> present;
  for (const Sample* s : items) {
    for (std::size_t f = 0; f < 4; ++f) {
      for (const auto& w : words_of(s->features, kAllFeatures[f])) {
        auto [it, inserted] = present[f].try_emplace(w, Counts{});
        ++it->second[index_of(s->label)];
      }
    }
  }
  std::optional<SplitTest> best;
  double best_h = parent;
  for (std::size_t f = 0; f < 4; ++f) {
    for (const auto& [word, p] : present[f]) {
      Counts a{};
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = all[i] - p[i];
      double h = split_entropy_of(p, a);
      if (h < best_h - kEntropyEpsilon) {
        best_h = h;
        best = SplitTest{kAllFeatures[f], word};
      }
    }
  }
  return best;
}

DecisionTree train(const std::vector<const Sample*>& items, const LearnerConfig& config) {
  Counts c = count_labels(items);
  CType majority = majority_of(c);
  if (items.size() < config.min_items) return DecisionTree::leaf(majority);
  if (entropy_of(c) == 0.0) return DecisionTree::leaf(majority);
  auto test = best_split_of(items);
  if (!test) return DecisionTree::leaf(majority);
  std::vector<const Sample*> yes, no;
  for (const Sample* s : items) {
    (words_of(s->features, test->feature).count(test->word) ? yes : no).push_back(s);
  }
  DecisionTree t = DecisionTree::node(*test, train(yes, config), train(no, config));
  t.label = majority;
  return t;
}

void emit_rules(const DecisionTree& t, int indent, std::string& out) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  if (t.is_leaf()) {
    out += pad + "ctype = " + std::string(to_string(t.label)) + "\n";
    return;
  }
  const DecisionTree* cur = &t;
  const char* kw = "if";
  while (!cur->is_leaf()) {
    out += pad + kw + " \"" + cur->test.word + "\" in " + std::string(to_string(cur->test.feature)) + ":";
    if (cur->present->is_leaf()) {
      out += " ctype = " + std::string(to_string(cur->present->label)) + "\n";
    } else {
      out += "\n";
      emit_rules(*cur->present, indent + 2, out);
    }
    kw = "elif";
    cur = cur->absent.get();
  }
  out += pad + "else: ctype = " + std::string(to_string(cur->label)) + "\n";
}

class RuleParser {
 public:
  explicit RuleParser(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto first = line.find_first_not_of(' ');
      if (first == std::string::npos) continue;
      lines_.push_back({static_cast<int>(first), line.substr(first), no});
    }
  }

  DecisionTree parse() {
    if (lines_.empty()) fail("empty rule text", 0);
    DecisionTree t = block(lines_[0].indent);
    if (pos_ != lines_.size()) fail("unexpected line", lines_[pos_].no);
    return t;
  }

 private:
  struct Line {
    int indent;
    std::string text;
    int no;
  };

  [[noreturn]] static void fail(const std::string& msg, int no) {
    throw std::invalid_argument("rules line " + std::to_string(no) + ": " + msg);
  }

  static CType label_of(std::string_view s, int no) {
    auto t = parse_ctype(s);
    if (!t) fail("unknown c-type '" + std::string(s) + "'", no);
    return *t;
  }

  // `ctype = X`
  static std::optional<CType> leaf_text(std::string_view s, int no) {
    constexpr std::string_view kPrefix = "ctype = ";
    if (!s.starts_with(kPrefix)) return std::nullopt;
    return label_of(s.substr(kPrefix.size()), no);
  }

  DecisionTree block(int indent) {
    if (pos_ >= lines_.size() || lines_[pos_].indent != indent) fail("expected a rule", line_no());
    const Line& l = lines_[pos_];
    if (auto leaf = leaf_text(l.text, l.no)) {
      ++pos_;
      return DecisionTree::leaf(*leaf);
    }
    return chain(indent, "if ");
  }

  DecisionTree chain(int indent, std::string_view kw) {
    const Line& l = lines_[pos_];
    if (!l.text.starts_with(kw)) fail("expected '" + std::string(kw) + "'", l.no);
    std::string_view rest = std::string_view(l.text).substr(kw.size());
    if (rest.empty() || rest.front() != '"') fail("expected quoted word", l.no);
    auto close = rest.find('"', 1);
    if (close == std::string_view::npos) fail("unterminated word", l.no);
    SplitTest test;
    test.word = std::string(rest.substr(1, close - 1));
    rest = rest.substr(close + 1);
    if (!rest.starts_with(" in ")) fail("expected 'in'", l.no);
    rest = rest.substr(4);
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) fail("expected ':'", l.no);
    auto f = parse_feature(rest.substr(0, colon));
    if (!f) fail("unknown feature", l.no);
    test.feature = *f;
    DecisionTree present = branch(indent, rest.substr(colon + 1), l.no);
    if (pos_ >= lines_.size() || lines_[pos_].indent != indent) fail("missing else", line_no());
    const Line& next = lines_[pos_];
    DecisionTree absent;
    if (next.text.starts_with("elif ")) {
      absent = chain(indent, "elif ");
    } else if (next.text.starts_with("else:")) {
      absent = branch(indent, std::string_view(next.text).substr(5), next.no);
    } else {
      fail("expected 'elif' or 'else'", next.no);
    }
    return DecisionTree::node(std::move(test), std::move(present), std::move(absent));
  }

  // Body after a ':' on a header line; inline leaf or an indented block.
  DecisionTree branch(int indent, std::string_view tail, int no) {
    ++pos_;
    while (!tail.empty() && tail.front() == ' ') tail.remove_prefix(1);
    if (!tail.empty()) {
      auto leaf = leaf_text(tail, no);
      if (!leaf) fail("expected 'ctype = <LABEL>'", no);
      return DecisionTree::leaf(*leaf);
    }
    if (pos_ >= lines_.size() || lines_[pos_].indent <= indent) fail("empty branch", no);
    return block(lines_[pos_].indent);
  }

  int line_no() const { return pos_ < lines_.size() ? lines_[pos_].no : 0; }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

nlohmann::json to_json_value(const DecisionTree& t) {
  if (t.is_leaf()) return {{"leaf", std::string(to_string(t.label))}};
  return {{"feature", std::string(to_string(t.test.feature))},
          {"word", t.test.word},
          {"label", std::string(to_string(t.label))},
          {"present", to_json_value(*t.present)},
          {"absent", to_json_value(*t.absent)}};
}

DecisionTree from_json_value(const nlohmann::json& j) {
  auto label = [](const nlohmann::json& v) {
    auto t = parse_ctype(v.get<std::string>());
    if (!t) throw std::invalid_argument("unknown c-type in tree json");
    return *t;
  };
  if (j.contains("leaf")) return DecisionTree::leaf(label(j.at("leaf")));
  auto f = parse_feature(j.at("feature").get<std::string>());
  if (!f) throw std::invalid_argument("unknown feature in tree json");
  DecisionTree t = DecisionTree::node(SplitTest{*f, j.at("word").get<std::string>()},
                                      from_json_value(j.at("present")),
                                      from_json_value(j.at("absent")));
  if (j.contains("label")) t.label = label(j.at("label"));
  return t;
}

}  // namespace

std::string_view to_string(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<Feature> parse_feature(std::string_view s) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (kFeatureNames[i] == s) return kAllFeatures[i];
  }
  return std::nullopt;
}

const std::set<std::string>& words_of(const FeatureVector& fv, Feature f) {
  switch (f) {
    case Feature::PrimaryFirstWords:
      return fv.primary_first;
    case Feature::PrimaryLastWords:
      return fv.primary_last;
    case Feature::SecondaryFirstWords:
      return fv.secondary_first;
    case Feature::SecondaryLastWords:
      break;
  }
  return fv.secondary_last;
}

std::size_t DecisionTree::depth() const {
  if (is_leaf()) return 0;
  return 1 + std::max(present->depth(), absent->depth());
}

std::size_t DecisionTree::leaf_count() const {
  if (is_leaf()) return 1;
  return present->leaf_count() + absent->leaf_count();
}

DecisionTree DecisionTree::leaf(CType label) {
  DecisionTree t;
  t.label = label;
  return t;
}

DecisionTree DecisionTree::node(SplitTest test, DecisionTree present, DecisionTree absent) {
  DecisionTree t;
  t.label = present.label;
  t.test = std::move(test);
  t.present = std::make_unique<DecisionTree>(std::move(present));
  t.absent = std::make_unique<DecisionTree>(std::move(absent));
  return t;
}

bool operator==(const DecisionTree& a, const DecisionTree& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return a.label == b.label;
  return a.test == b.test && *a.present == *b.present && *a.absent == *b.absent;
}

double set_entropy(const std::vector<CType>& labels) {
  if (labels.empty()) throw std::invalid_argument("entropy of an empty set");
  Counts c{};
  for (CType t : labels) ++c[index_of(t)];
  return entropy_of(c);
}

double split_entropy(const std::vector<CType>& present, const std::vector<CType>& absent) {
  if (present.empty() && absent.empty()) throw std::invalid_argument("split of an empty set");
  Counts a{}, b{};
  for (CType t : present) ++a[index_of(t)];
  for (CType t : absent) ++b[index_of(t)];
  return split_entropy_of(a, b);
}

CType majority_label(const std::vector<CType>& labels) {
  Counts c{};
  for (CType t : labels) ++c[index_of(t)];
  return majority_of(c);
}

std::optional<SplitTest> best_split(const std::vector<Sample>& samples) {
  std::vector<const Sample*> items;
  for (const auto& s : samples) items.push_back(&s);
  return best_split_of(items);
}

DecisionTree id3_train(const std::vector<Sample>& samples, const LearnerConfig& config) {
  if (samples.empty()) throw std::invalid_argument("empty training set");
  if (config.min_items < 1) throw std::invalid_argument("min_items must be at least 1");
  std::vector<const Sample*> items;
  items.reserve(samples.size());
  for (const auto& s : samples) items.push_back(&s);
  return train(items, config);
}

CType classify(const DecisionTree& tree, const FeatureVector& fv) {
  const DecisionTree* t = &tree;
  while (!t->is_leaf()) {
    t = words_of(fv, t->test.feature).count(t->test.word) ? t->present.get() : t->absent.get();
  }
  return t->label;
}

std::string tree_to_rules(const DecisionTree& tree) {
  std::string out;
  emit_rules(tree, 0, out);
  return out;
}

DecisionTree tree_from_rules(std::string_view text) { return RuleParser(text).parse(); }

std::string tree_to_json(const DecisionTree& tree) { return to_json_value(tree).dump(1); }

DecisionTree tree_from_json(std::string_view text) {
  return from_json_value(nlohmann::json::parse(text));
}

}  // namespace ctm
