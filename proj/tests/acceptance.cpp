// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed below.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ctm/cli.hpp"
#include "ctm/eval.hpp"
#include "ctm/extract.hpp"
#include "ctm/features.hpp"
#include "ctm/generator.hpp"
#include "ctm/id3.hpp"
#include "ctm/parser.hpp"
#include "ctm/registry.hpp"

using namespace ctm;
namespace fs = std::filesystem;

namespace {

constexpr double kConfigPathSeconds = 1.0;
constexpr double kEntropyTolerance = 1e-9;
constexpr double kBenchmarkSeconds = 30.0;
constexpr double kBenchmarkMacroF = 0.90;
constexpr std::size_t kBenchmarkMinProjects = 3;
constexpr std::size_t kBenchmarkMinSites = 200;

const fs::path kFixtures = CTM_FIXTURE_DIR;

using Tokens = std::vector<std::string>;
using Clock = std::chrono::steady_clock;

struct Failure {
  std::string why;
};

void expect(bool ok, const std::string& why) {
  if (!ok) throw Failure{why};
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("ctm_accept_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

std::string set_text(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& w : s) out += (out.size() > 1 ? "," : "") + w;
  return out + "}";
}

// --- criteria ---------------------------------------------------------------

std::string config_path_fidelity() {
  auto t0 = Clock::now();
  Registry reg = load_registry(default_registry_path());
  ScanResult r = scan_project(kFixtures / "config_path", reg, "config_path");
  double dt = seconds_since(t0);
  expect(r.occurrences.size() == 1,
         "expected one occurrence, got " + std::to_string(r.occurrences.size()));
  const Occurrence& o = r.occurrences.front();
  expect(o.label == CType::PATH, "label " + std::string(to_string(o.label)));
  expect(o.expr_text == "config.getPath(i)", "expr " + o.expr_text);
  RankedIdentifiers ids = rank_identifiers(build_dependency_graph(*o.expr));
  expect(ids.primary == std::set<std::string>{"getPath"}, "primary " + set_text(ids.primary));
  expect(ids.secondary == std::set<std::string>{"config", "i"},
         "secondary " + set_text(ids.secondary));
  FeatureVector want;
  want.primary_first = {"get"};
  want.primary_last = {"path"};
  want.secondary_first = {"config", "i"};
  want.secondary_last = {"config", "i"};
  expect(o.features && *o.features == want, "feature vector differs");
  expect(dt < kConfigPathSeconds, "took " + std::to_string(dt) + " s");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f s", dt);
  return buf;
}

Tokens regex_oracle(const std::string& name) {
  static const std::regex re("[A-Z][a-z]+|[A-Z]+|[a-z]+", std::regex::extended);
  Tokens out;
  for (auto it = std::sregex_iterator(name.begin(), name.end(), re); it != std::sregex_iterator();
       ++it) {
    std::string t = it->str();
    for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(t);
  }
  return out;
}

std::string segmentation_suite() {
  const std::vector<std::pair<std::string, Tokens>> golden = {
      {"getConfigPath", {"get", "config", "path"}},
      {"get_config_path", {"get", "config", "path"}},
      {"URLString", {"urls", "tring"}},
      {"x", {"x"}},
      {"port", {"port"}},
      {"serverPort", {"server", "port"}},
      {"HTTP_PORT", {"http", "port"}},
      {"DEFAULT_TARGET_FOLDER", {"default", "target", "folder"}},
      {"leftButtonWidth", {"left", "button", "width"}},
      {"getX", {"get", "x"}},
      {"setBounds2D", {"set", "bounds", "d"}},
      {"__x1y", {"x", "y"}},
      {"$jq", {"jq"}},
      {"MAX_VALUE", {"max", "value"}},
      {"toURI", {"to", "uri"}},
      {"parseXMLDocument", {"parse", "xmld", "ocument"}},
      {"a1b2c3", {"a", "b", "c"}},
      {"_123", {}},
      {"getHostName", {"get", "host", "name"}},
      {"IOException", {"ioe", "xception"}},
      {"userDir", {"user", "dir"}},
      {"ABC", {"abc"}},
      {"Config", {"config"}},
      {"getY", {"get", "y"}},
  };
  for (const auto& [name, want] : golden) {
    expect(segment_identifier(name) == want, name + ": segmenter disagrees with golden tokens");
    expect(regex_oracle(name) == want, name + ": regex oracle disagrees with golden tokens");
  }
  return std::to_string(golden.size()) + " identifiers";
}

std::set<std::string>& words_for(FeatureVector& fv, Feature f) {
  switch (f) {
    case Feature::PrimaryFirstWords: return fv.primary_first;
    case Feature::PrimaryLastWords: return fv.primary_last;
    case Feature::SecondaryFirstWords: return fv.secondary_first;
    case Feature::SecondaryLastWords: return fv.secondary_last;
  }
  return fv.primary_first;
}

double oracle_entropy(const std::vector<CType>& labels) {
  std::map<CType, double> n;
  for (CType c : labels) n[c] += 1;
  double h = 0;
  for (auto& [_, k] : n) {
    double p = k / static_cast<double>(labels.size());
    h -= p * std::log2(p);
  }
  return h;
}

std::string id3_oracle() {
  // Word pools keep the number of distinct (feature, word) tests at most 6.
  const std::vector<std::pair<Feature, std::vector<std::string>>> pools = {
      {Feature::PrimaryFirstWords, {"get", "file"}},
      {Feature::PrimaryLastWords, {"path"}},
      {Feature::SecondaryFirstWords, {"host", "config"}},
      {Feature::SecondaryLastWords, {"port"}},
  };
  const CType labels[] = {CType::PATH, CType::HOST, CType::PORT, CType::URL};
  std::mt19937 rng(2024);
  std::size_t datasets = 0, splits_checked = 0;
  for (int round = 0; round < 3000; ++round) {
    std::size_t n = 1 + rng() % 50;
    std::vector<Sample> data(n);
    for (auto& s : data) {
      for (const auto& [f, words] : pools) {
        for (const auto& w : words) {
          if (rng() % 2) words_for(s.features, f).insert(w);
        }
      }
      s.label = labels[rng() % (1 + round % 4)];
    }
    std::vector<CType> all;
    for (const auto& s : data) all.push_back(s.label);
    double parent = oracle_entropy(all);

    std::optional<SplitTest> best;
    double best_h = parent;
    std::size_t tests = 0;
    for (Feature f : kAllFeatures) {
      std::set<std::string> words;
      for (const auto& s : data) words.insert(words_of(s.features, f).begin(), words_of(s.features, f).end());
      for (const auto& w : words) {
        ++tests;
        std::vector<CType> in, out;
        for (const auto& s : data) (words_of(s.features, f).count(w) ? in : out).push_back(s.label);
        double h = 0;
        if (!in.empty()) h += in.size() * oracle_entropy(in) / n;
        if (!out.empty()) h += out.size() * oracle_entropy(out) / n;
        double got = split_entropy(in, out);
        expect(std::abs(got - h) <= kEntropyTolerance, "split entropy off by " + std::to_string(got - h));
        ++splits_checked;
        if (h < best_h - 1e-12) {
          best_h = h;
          best = SplitTest{f, w};
        }
      }
    }
    expect(tests <= 6, "dataset has more than 6 candidate tests");
    expect(std::abs(set_entropy(all) - parent) <= kEntropyTolerance, "set entropy mismatch");
    DecisionTree tree = id3_train(data, LearnerConfig{1});
    if (best) {
      expect(!tree.is_leaf() && tree.test == *best,
             "root test differs from exhaustive minimum on dataset " + std::to_string(round));
    } else {
      expect(tree.is_leaf(), "expected a leaf when no test lowers entropy");
    }
    ++datasets;
  }
  return std::to_string(datasets) + " datasets, " + std::to_string(splits_checked) + " splits";
}

Sample sample(const char* word, CType label) {
  Sample s;
  s.features.primary_first = {word};
  s.features.primary_last = {word};
  s.label = label;
  return s;
}

std::string cutoff() {
  std::vector<Sample> nine;
  for (int i = 0; i < 5; ++i) nine.push_back(sample("port", CType::PORT));
  for (int i = 0; i < 4; ++i) nine.push_back(sample("host", CType::HOST));
  DecisionTree a = id3_train(nine, LearnerConfig{10});
  expect(a.is_leaf(), "9 samples did not give a single leaf");
  expect(a.label == CType::PORT, "leaf is not the majority label");

  std::vector<Sample> ten = nine;
  ten.push_back(sample("host", CType::HOST));
  DecisionTree b = id3_train(ten, LearnerConfig{10});
  expect(!b.is_leaf(), "10 separable samples gave a leaf");
  expect(b.present && b.present->is_leaf() && b.absent && b.absent->is_leaf(),
         "10 separable samples should split once");
  return "9 -> leaf, 10 -> depth " + std::to_string(b.depth());
}

std::string component_counting() {
  expect(component_count(parse_expression("path")) == 1, "path != 1");
  expect(component_count(parse_expression("file.getParent()")) == 2, "file.getParent() != 2");
  std::string chain = "a.b().c().d().e().f().g()";
  Expr e = parse_expression(chain);
  expect(component_count(e) == 7, "7-link chain counted as " + std::to_string(component_count(e)));
  Occurrence o;
  o.project = "p";
  o.label = CType::PATH;
  o.expr = std::make_shared<const Expr>(e);
  o.expr_text = chain;
  LengthHistogram h = report_length_histogram({o});
  expect(h.counts.at(CType::PATH)[kLengthBuckets - 1] == 1, "chain not in the >=7 bucket");
  expect(h.percent(CType::PATH)[kLengthBuckets - 1] == 100.0, "bucket percentage");
  return "1, 2, >=7";
}

std::string generator_benchmark() {
  fs::path dir = scratch("bench");
  auto corpus = generate_corpus();
  std::size_t sites = 0;
  for (const auto& p : corpus) sites += p.call_sites;
  expect(corpus.size() >= kBenchmarkMinProjects, "too few projects");
  expect(sites >= kBenchmarkMinSites, "too few call sites");
  write_corpus(dir / "corpus", corpus);

  auto t0 = Clock::now();
  expect(cli({"extract", "--manifest", (dir / "corpus/projects.tsv").string(), "--out",
              (dir / "occ").string()}) == 0,
         "extract failed");
  expect(cli({"evaluate", (dir / "occ").string(), "--out", (dir / "eval").string()}) == 0,
         "evaluate failed");
  double dt = seconds_since(t0);

  std::vector<Occurrence> occs;
  for (const auto& p : corpus) {
    auto part = read_occurrences(dir / "occ" / (p.name + ".jsonl"));
    occs.insert(occs.end(), part.begin(), part.end());
  }
  EvaluationResult r = evaluate_lopo(occs);
  expect(slurp(dir / "eval/metrics.tsv") == format_metrics_tsv(r.metrics),
         "written metrics differ from a recomputation");
  fs::remove_all(dir);

  const LabelMetrics& url = r.metrics[CType::URL];
  std::string lowest;
  double low = 2;
  for (CType c : kAllCTypes) {
    if (r.metrics[c].support == 0) continue;
    if (r.metrics[c].f < low) {
      low = r.metrics[c].f;
      lowest = std::string(to_string(c));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu projects, %zu sites, %.2f s, macro F %.3f, URL F %.3f", corpus.size(),
                sites, dt, r.metrics.macro_f, url.f);
  expect(dt < kBenchmarkSeconds, std::string(buf) + ": too slow");
  expect(r.metrics.macro_f >= kBenchmarkMacroF, std::string(buf) + ": macro F below target");
  expect(url.support > 0 && lowest == "URL", std::string(buf) + ": lowest F is " + lowest);
  return buf;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string text = slurp(e.path());
    if (e.path().extension() == ".log") text = text.substr(text.find('\n') + 1);
    out[fs::relative(e.path(), dir).generic_string()] = text;
  }
  return out;
}

std::string determinism() {
  fs::path dir = scratch("determinism");
  // identical inputs for both runs
  write_corpus(dir / "corpus", generate_corpus());
  std::string manifest = (dir / "corpus/projects.tsv").string();
  std::map<std::string, std::string> first;
  for (int run = 0; run < 2; ++run) {
    fs::path base = dir / ("run" + std::to_string(run));
    std::string b = base.string();
    expect(cli({"generate", b + "/gen"}) == 0, "generate failed");
    expect(cli({"extract", "--manifest", manifest, "--out", b + "/occ"}) == 0, "extract failed");
    expect(cli({"train", b + "/occ", "--out", b + "/train"}) == 0, "train failed");
    expect(cli({"evaluate", b + "/occ", "--out", b + "/eval"}) == 0, "evaluate failed");
    expect(cli({"report", b + "/occ", "--out", b + "/report"}) == 0, "report failed");
    std::ostringstream out, err;
    expect(run_cli({"predict", b + "/train/tree.json", "--occurrences", b + "/occ/atlas.jsonl"}, out,
                   err) == 0,
           "predict failed");
    std::ofstream(base / "predict.out") << out.str() << err.str();
    auto snap = snapshot(base);
    snap.erase("gen/projects.tsv");  // holds absolute roots
    if (run == 0) {
      first = std::move(snap);
    } else {
      for (const auto& [name, text] : first) {
        auto it = snap.find(name);
        expect(it != snap.end(), name + " missing in second run");
        expect(it->second == text, name + " differs between runs");
      }
      expect(snap.size() == first.size(), "artifact sets differ");
    }
  }
  fs::remove_all(dir);
  return std::to_string(first.size()) + " artifacts identical";
}

std::string registry_round_trip() {
  fs::path path = default_registry_path();
  Registry r = load_registry(path);
  std::istringstream in(slurp(path));
  std::string line, expected;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    expected += line + "\n";
  }
  expect(serialize_registry(r) == expected, "serialization differs from the bundled file");
  const char* core[] = {"java.io.File.<init>(LString;)V 0=PATH",
                           "java.net.URI.<init>(LString;)V 0=URL",
                           "java.sql.Statement.execute(LString;)Z 0=SQL",
                           "java.net.InetAddress.getByName(LString;)LInetAddress; 0=HOST",
                           "java.net.Socket.<init>(LString;I)V 0=HOST 1=PORT",
                           "java.awt.Point.<init>(II)V 0=XCOORD 1=YCOORD",
                           "java.awt.Dimension.<init>(II)V 0=WIDTH 1=HEIGHT",
                           "java.util.Date.<init>(III)V 0=YEAR 1=MONTH 2=DAY",
                           "java.util.Date.setYear(I)V 0=YEAR",
                           "java.time.LocalDate.of(III)LLocalDate; 0=YEAR 1=MONTH 2=DAY"};
  for (const char* row : core) {
    Registry one = parse_registry(row);
    const RegistryEntry& want = one.entries().begin()->second;
    const RegistryEntry* got = r.find(want.method);
    expect(got && got->arg_ctypes == want.arg_ctypes, std::string("missing ") + row);
  }
  return std::to_string(r.size()) + " entries, 10 core rows";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"config-path-fidelity", config_path_fidelity},
      {"segmentation-golden-suite", segmentation_suite},
      {"entropy-id3-oracle", id3_oracle},
      {"cutoff-behavior", cutoff},
      {"component-counting", component_counting},
      {"generator-benchmark", generator_benchmark},
      {"determinism", determinism},
      {"registry-round-trip", registry_round_trip},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    try {
      std::string detail = check();
      std::cout << "PASS " << name << ": " << detail << "\n";
    } catch (const Failure& f) {
      ++failed;
      std::cout << "FAIL " << name << ": " << f.why << "\n";
    } catch (const std::exception& e) {
      ++failed;
      std::cout << "FAIL " << name << ": exception: " << e.what() << "\n";
    }
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
