#include "ctm/occurrence.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ctm/parser.hpp"

namespace ctm {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kFeatureKeys[] = {"primary_first_words", "primary_last_words",
                                        "secondary_first_words", "secondary_last_words"};

std::set<std::string>* mutable_set(FeatureVector& fv, std::size_t i) {
  switch (i) {
    case 0: return &fv.primary_first;
    case 1: return &fv.primary_last;
    case 2: return &fv.secondary_first;
    default: return &fv.secondary_last;
  }
}

const std::set<std::string>& feature_set(const FeatureVector& fv, std::size_t i) {
  return *mutable_set(const_cast<FeatureVector&>(fv), i);
}

}  // namespace

FeatureVector featurize(const Occurrence& occ, SegmentationMode mode) {
  if (!occ.expr) return {};
  return featurize(*occ.expr, mode);
}

FeatureVector features_of(const Occurrence& occ, SegmentationMode mode) {
  return occ.features ? *occ.features : featurize(occ, mode);
}

std::vector<std::pair<std::string, std::size_t>> top_words(const std::vector<Occurrence>& occs,
                                                          CType label) {
  std::map<std::string, std::set<std::string>> projects;
  std::map<std::string, std::size_t> uses;
  for (const auto& o : occs) {
    if (o.label != label) continue;
    FeatureVector fv = features_of(o);
    std::set<std::string> words;
    for (std::size_t i = 0; i < 4; ++i) words.insert(feature_set(fv, i).begin(), feature_set(fv, i).end());
    for (const auto& w : words) {
      projects[w].insert(o.project);
      ++uses[w];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& [w, ps] : projects) out.emplace_back(w, ps.size());
  // ties on project count go to the word used by more occurrences
  std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return uses.at(a.first) > uses.at(b.first);
  });
  return out;
}

std::string occurrence_to_json(const Occurrence& occ) {
  ordered_json j;
  j["project"] = occ.project;
  j["file"] = occ.file;
  j["line"] = occ.line;
  j["callee"] = occ.callee.text();
  j["arg_pos"] = occ.arg_pos;
  j["label"] = std::string(to_string(occ.label));
  j["expr_text"] = occ.expr_text;
  if (occ.features) {
    ordered_json f;
    for (std::size_t i = 0; i < 4; ++i) f[kFeatureKeys[i]] = feature_set(*occ.features, i);
    j["features"] = std::move(f);
  } else {
    j["features"] = nullptr;
  }
  return j.dump();
}

namespace {

Occurrence from_json_at(std::string_view line, std::size_t line_no) {
  auto fail = [&](const std::string& msg) -> OccurrenceFormatError {
    return OccurrenceFormatError(msg, line_no);
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw fail("expected an object");
  Occurrence o;
  try {
    o.project = j.at("project").get<std::string>();
    o.file = j.at("file").get<std::string>();
    o.line = j.at("line").get<int>();
    o.callee = MethodId::parse(j.at("callee").get<std::string>());
    o.arg_pos = j.at("arg_pos").get<std::size_t>();
    auto label = parse_ctype(j.at("label").get<std::string>());
    if (!label) throw fail("unknown label " + j.at("label").get<std::string>());
    o.label = *label;
    o.expr_text = j.at("expr_text").get<std::string>();
    if (j.contains("features") && !j["features"].is_null()) {
      FeatureVector fv;
      for (std::size_t i = 0; i < 4; ++i) {
        for (const auto& w : j["features"].at(kFeatureKeys[i])) mutable_set(fv, i)->insert(w.get<std::string>());
      }
      o.features = std::move(fv);
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("bad field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw fail(e.what());
  }
  try {
    o.expr = std::make_shared<const Expr>(parse_expression(o.expr_text));
  } catch (const SyntaxError& e) {
    throw fail("expr_text does not parse: " + std::string(e.what()));
  }
  return o;
}

}  // namespace

Occurrence occurrence_from_json(std::string_view line) { return from_json_at(line, 1); }

std::string occurrences_to_jsonl(const std::vector<Occurrence>& occs) {
  std::string out;
  for (const auto& o : occs) out += occurrence_to_json(o) + '\n';
  return out;
}

std::vector<Occurrence> occurrences_from_jsonl(std::string_view text) {
  std::vector<Occurrence> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    out.push_back(from_json_at(line, line_no));
  }
  return out;
}

void write_occurrences(const std::filesystem::path& file, const std::vector<Occurrence>& occs) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << occurrences_to_jsonl(occs);
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::vector<Occurrence> read_occurrences(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return occurrences_from_jsonl(ss.str());
}

}  // namespace ctm
