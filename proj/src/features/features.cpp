#include "ctm/features.hpp"

#include <deque>
#include <map>

#include "ctm/method_id.hpp"

namespace ctm {
namespace {

class GraphBuilder {
 public:
  explicit GraphBuilder(DepGraph& g) : g_(g) {}

  std::size_t build(const Expr& e) {
    switch (e.kind) {
      case ExprKind::constant:
        return add(NodeKind::constant, e.literal, e);
      case ExprKind::var_ref:
        if (e.name == "this" || e.name == "super") return add(NodeKind::constant, e.name, e);
        return add(NodeKind::identifier, e.name, e);
      case ExprKind::field_access: {
        std::size_t recv = build(e.children.front());
        std::size_t n = add(NodeKind::identifier, e.name, e);
        edge(recv, n);
        return n;
      }
      case ExprKind::method_call: {
        std::size_t n = add(NodeKind::identifier, e.name, e, true);
        for (const auto& c : e.children) edge(build(c), n);
        return n;
      }
      case ExprKind::new_object: {
        std::size_t n = add(NodeKind::identifier, simple_type_name(e.name), e, true);
        for (const auto& c : e.children) edge(build(c), n);
        return n;
      }
      case ExprKind::method_ref: {
        std::size_t n = add(NodeKind::identifier, e.name, e);
        for (const auto& c : e.children) edge(build(c), n);
        return n;
      }
      case ExprKind::unary_op:
      case ExprKind::binary_op:
      case ExprKind::array_access:
      case ExprKind::new_array:
      case ExprKind::array_init:
      case ExprKind::switch_expr:
        return op_node(e, op_text(e), e.children.begin(), e.children.end());
      case ExprKind::conditional:
        return op_node(e, "?:", e.children.begin() + 1, e.children.end());
      case ExprKind::assignment: {
        std::size_t value = build(e.children.back());
        std::size_t target = build(e.children.front());
        edge(value, target);
        return target;
      }
      case ExprKind::cast:
        return build(e.children.front());
      case ExprKind::lambda:
        return add(NodeKind::constant, "->", e);
    }
    return add(NodeKind::constant, "", e);
  }

 private:
  static std::string op_text(const Expr& e) {
    switch (e.kind) {
      case ExprKind::array_access:
        return "[]";
      case ExprKind::new_array:
        return "new[]";
      case ExprKind::array_init:
        return "{}";
      case ExprKind::switch_expr:
        return "switch";
      default:
        return e.op;
    }
  }

  template <class It>
  std::size_t op_node(const Expr& e, const std::string& text, It first, It last) {
    std::size_t n = add(NodeKind::op, text, e);
    for (; first != last; ++first) edge(build(*first), n);
    return n;
  }

  std::size_t add(NodeKind kind, const std::string& text, const Expr& origin, bool call = false) {
    g_.nodes.push_back(DepNode{kind, text, call, &origin});
    return g_.nodes.size() - 1;
  }

  void edge(std::size_t from, std::size_t to) { g_.edges.emplace_back(from, to); }

  DepGraph& g_;
};

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

std::string lowered(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (is_upper(c)) c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

std::vector<std::size_t> DepGraph::producers(std::size_t consumer) const {
  std::vector<std::size_t> out;
  for (const auto& [from, to] : edges) {
    if (to == consumer) out.push_back(from);
  }
  return out;
}

DepGraph build_dependency_graph(const Expr& expr) {
  DepGraph g;
  GraphBuilder b(g);
  g.top = b.build(expr);
  return g;
}

RankedIdentifiers rank_identifiers(const DepGraph& g) {
  RankedIdentifiers out;
  if (g.nodes.empty()) return out;
  std::vector<std::vector<std::size_t>> into(g.nodes.size());
  for (const auto& [from, to] : g.edges) into[to].push_back(from);

  auto weight = [&](std::size_t n) { return g.nodes[n].kind == NodeKind::identifier ? 1 : 0; };
  std::vector<int> rank(g.nodes.size(), -1);
  std::deque<std::size_t> queue{g.top};
  rank[g.top] = weight(g.top);
  std::map<std::string, int> best;
  while (!queue.empty()) {
    std::size_t n = queue.front();
    queue.pop_front();
    if (weight(n)) {
      auto [it, inserted] = best.emplace(g.nodes[n].text, rank[n]);
      if (!inserted && rank[n] < it->second) it->second = rank[n];
    }
    for (std::size_t p : into[n]) {
      if (rank[p] != -1) continue;
      rank[p] = rank[n] + weight(p);
      if (rank[p] <= 3) queue.push_back(p);
    }
  }
  for (const auto& [text, r] : best) {
    if (r == 1) out.primary.insert(text);
    else if (r == 2) out.secondary.insert(text);
    else if (r == 3) out.ternary.insert(text);
  }
  return out;
}

std::vector<std::string> segment_identifier(std::string_view name, SegmentationMode mode) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < name.size()) {
    char c = name[i];
    if (is_lower(c)) {
      std::size_t j = i;
      while (j < name.size() && is_lower(name[j])) ++j;
      out.push_back(std::string(name.substr(i, j - i)));
      i = j;
    } else if (is_upper(c)) {
      std::size_t up = i;
      while (up < name.size() && is_upper(name[up])) ++up;
      std::size_t low = up;
      while (low < name.size() && is_lower(name[low])) ++low;
      std::size_t run = up - i;
      std::size_t end;
      if (run == 1) {
        end = low;  // [A-Z][a-z]* (a lone capital when no lowercase follows)
      } else if (mode == SegmentationMode::camel && low > up) {
        end = up - 1;
      } else {
        end = up;  // [A-Z]+ is the longer match whenever the run exceeds one letter
      }
      out.push_back(lowered(name.substr(i, end - i)));
      i = end;
    } else {
      ++i;
    }
  }
  return out;
}

FeatureVector featurize(const RankedIdentifiers& ids, SegmentationMode mode) {
  FeatureVector f;
  auto add = [&](const std::set<std::string>& names, std::set<std::string>& first,
                 std::set<std::string>& last) {
    for (const auto& n : names) {
      auto tokens = segment_identifier(n, mode);
      if (tokens.empty()) continue;
      first.insert(tokens.front());
      last.insert(tokens.back());
    }
  };
  add(ids.primary, f.primary_first, f.primary_last);
  add(ids.secondary, f.secondary_first, f.secondary_last);
  return f;
}

FeatureVector featurize(const Expr& expr, SegmentationMode mode) {
  return featurize(rank_identifiers(build_dependency_graph(expr)), mode);
}

}  // namespace ctm
