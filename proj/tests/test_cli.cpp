#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

#include "ctm/cli.hpp"
#include "ctm/eval.hpp"
#include "ctm/extract.hpp"
#include "ctm/generator.hpp"
#include "ctm/id3.hpp"
#include "ctm/parser.hpp"

using namespace ctm;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = CTM_FIXTURE_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_ctm(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("ctm_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& s) const { return (path / s).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Occurrence occ(const std::string& project, const std::string& text, CType label) {
  Occurrence o;
  o.project = project;
  o.file = "F.java";
  o.line = 1;
  o.callee = MethodId::parse("java.io.File.<init>(LString;)V");
  o.label = label;
  o.expr = std::make_shared<const Expr>(parse_expression(text));
  o.expr_text = text;
  o.features = featurize(*o.expr);
  return o;
}

/// Everything under dir, logs without their timestamp header.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string text = slurp(e.path());
    if (e.path().extension() == ".log") {
      REQUIRE(text.rfind("# ctm ", 0) == 0);
      text = text.substr(text.find('\n') + 1);
    }
    out[fs::relative(e.path(), dir).generic_string()] = text;
  }
  return out;
}

double entropy_of(const std::map<CType, int>& counts) {
  int n = 0;
  for (auto& [_, c] : counts) n += c;
  double h = 0;
  for (auto& [_, c] : counts) {
    if (c == 0) continue;
    double p = double(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

TEST_CASE("project specs and manifests") {
  ProjectSpec s = parse_project_spec("app=/src/app");
  CHECK(s.name == "app");
  CHECK(s.root == fs::path("/src/app"));
  CHECK_THROWS_AS(parse_project_spec("app"), std::invalid_argument);
  CHECK_THROWS_AS(parse_project_spec("=x"), std::invalid_argument);

  TempDir t("manifest");
  std::ofstream(t / "m.tsv") << "# projects\none\trel/one\n\ntwo\t/abs/two\n";
  auto specs = read_manifest(t / "m.tsv");
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].root == t.path / "rel/one");
  CHECK(specs[1].root == fs::path("/abs/two"));
  std::ofstream(t / "bad.tsv") << "one /no/tab\n";
  CHECK_THROWS_AS(read_manifest(t / "bad.tsv"), std::invalid_argument);
}

TEST_CASE("extract writes one file per project and a count table") {
  TempDir t("extract");
  Run r = run_ctm({"extract", "config_path=" + (kFixtures / "config_path").string(),
               "home=" + (kFixtures / "primitive").string(), "--out", t / "occ"});
  CHECK(r.code == 0);
  CHECK(fs::exists(t.path / "occ/config_path.jsonl"));
  CHECK(fs::exists(t.path / "occ/home.jsonl"));
  CHECK(fs::exists(t.path / "occ/counts.tsv"));
  CHECK(fs::exists(t.path / "occ/extract.log"));

  auto home = read_occurrences(t.path / "occ/home.jsonl");
  REQUIRE(home.size() == 1);
  CHECK(home[0].label == CType::PATH);
  CHECK(home[0].expr_text == "path");
  CHECK(home[0].project == "home");

  std::string counts = slurp(t.path / "occ/counts.tsv");
  CHECK(counts.find("config_path\t1\t") != std::string::npos);
  CHECK(counts.find("Total\t2\t") != std::string::npos);
}

TEST_CASE("extract tolerates a missing root unless every project fails") {
  TempDir t("extract_fail");
  Run partial = run_ctm({"extract", "ok=" + (kFixtures / "config_path").string(),
                     "gone=" + (t.path / "nope").string(), "--out", t / "a"});
  CHECK(partial.code == 0);
  CHECK(fs::exists(t.path / "a/ok.jsonl"));
  CHECK_FALSE(fs::exists(t.path / "a/gone.jsonl"));
  CHECK(partial.err.find("gone") != std::string::npos);

  Run none = run_ctm({"extract", "gone=" + (t.path / "nope").string(), "--out", t / "b"});
  CHECK(none.code != 0);

  Run dup = run_ctm({"extract", "x=" + (kFixtures / "config_path").string(),
                 "x=" + (kFixtures / "primitive").string(), "--out", t / "c"});
  CHECK(dup.code != 0);
  CHECK(run_ctm({"extract", "--out", t / "d"}).code != 0);
  CHECK(run_ctm({"extract", "x=" + (kFixtures / "config_path").string(), "--segmentation", "weird"}).code != 0);
}

TEST_CASE("train: pure corpus, cutoff, root test and empty input") {
  TempDir t("train");
  std::vector<Occurrence> pure;
  for (int i = 0; i < 12; ++i) pure.push_back(occ("p", "filePath" + std::to_string(i), CType::PATH));
  write_occurrences(t.path / "pure.jsonl", pure);
  REQUIRE(run_ctm({"train", t / "pure.jsonl", "--out", t / "pure"}).code == 0);
  CHECK(tree_from_json(slurp(t.path / "pure/tree.json")) == DecisionTree::leaf(CType::PATH));
  CHECK(slurp(t.path / "pure/rules.txt") == "ctype = PATH\n");

  std::vector<Occurrence> nine;
  for (int i = 0; i < 5; ++i) nine.push_back(occ("p", "serverPort", CType::PORT));
  for (int i = 0; i < 4; ++i) nine.push_back(occ("p", "hostName", CType::HOST));
  write_occurrences(t.path / "nine.jsonl", nine);
  REQUIRE(run_ctm({"train", t / "nine.jsonl", "--out", t / "nine"}).code == 0);
  CHECK(tree_from_json(slurp(t.path / "nine/tree.json")).is_leaf());
  REQUIRE(run_ctm({"train", t / "nine.jsonl", "--min-items", "1", "--out", t / "nine1"}).code == 0);
  CHECK_FALSE(tree_from_json(slurp(t.path / "nine1/tree.json")).is_leaf());

  // mixed corpus: the root test has the lowest split entropy of all tests
  std::vector<Occurrence> mixed = nine;
  for (int i = 0; i < 6; ++i) mixed.push_back(occ("q", "config.getPath(i)", CType::PATH));
  for (int i = 0; i < 3; ++i) mixed.push_back(occ("q", "localPort", CType::PORT));
  for (int i = 0; i < 2; ++i) mixed.push_back(occ("q", "urlString + path", CType::URL));
  write_occurrences(t.path / "mixed.jsonl", mixed);
  REQUIRE(run_ctm({"train", t / "mixed.jsonl", "--out", t / "mixed"}).code == 0);
  DecisionTree tree = tree_from_json(slurp(t.path / "mixed/tree.json"));
  REQUIRE_FALSE(tree.is_leaf());
  double best = 1e9;
  std::vector<SplitTest> best_tests;
  for (Feature f : kAllFeatures) {
    std::set<std::string> words;
    for (const auto& o : mixed) {
      const auto& ws = words_of(*o.features, f);
      words.insert(ws.begin(), ws.end());
    }
    for (const auto& w : words) {
      std::map<CType, int> in, out;
      int n_in = 0, n_out = 0;
      for (const auto& o : mixed) {
        if (words_of(*o.features, f).count(w)) ++in[o.label], ++n_in;
        else ++out[o.label], ++n_out;
      }
      double h = (n_in * entropy_of(in) + n_out * entropy_of(out)) / (n_in + n_out);
      if (h < best - 1e-12) {
        best = h;
        best_tests = {SplitTest{f, w}};
      } else if (std::abs(h - best) <= 1e-12) {
        best_tests.push_back(SplitTest{f, w});
      }
    }
  }
  CHECK(tree.test == best_tests.front());

  std::ofstream(t / "empty.jsonl") << "";
  Run empty = run_ctm({"train", t / "empty.jsonl", "--out", t / "empty"});
  CHECK(empty.code != 0);
  CHECK(empty.err.find("no training data") != std::string::npos);
  CHECK(run_ctm({"train", t / "missing.jsonl", "--out", t / "x"}).code != 0);
  CHECK(run_ctm({"train", t / "pure.jsonl", "--min-items", "0", "--out", t / "x"}).code != 0);
}

TEST_CASE("predict an expression or an occurrence file") {
  TempDir t("predict");
  std::vector<Occurrence> corpus;
  for (int i = 0; i < 8; ++i) corpus.push_back(occ("p", "filePath", CType::PATH));
  for (int i = 0; i < 8; ++i) corpus.push_back(occ("p", "getPath()", CType::PATH));
  for (int i = 0; i < 6; ++i) corpus.push_back(occ("p", "port", CType::PORT));
  write_occurrences(t.path / "train.jsonl", corpus);
  REQUIRE(run_ctm({"train", t / "train.jsonl", "--out", t / "m"}).code == 0);

  Run r = run_ctm({"predict", t / "m/tree.json", "--expr", "config.getPath(i)"});
  CHECK(r.code == 0);
  CHECK(r.out == "PATH\n");
  CHECK(run_ctm({"predict", t / "m/rules.txt", "--expr", "config.getPath(i)"}).out == "PATH\n");

  Run bad = run_ctm({"predict", t / "m/tree.json", "--expr", "\"not an expr"});
  CHECK(bad.code != 0);

  std::vector<Occurrence> check = {occ("p", "urlPath", CType::URL), occ("p", "port", CType::PORT)};
  write_occurrences(t.path / "check.jsonl", check);
  Run many = run_ctm({"predict", t / "m/tree.json", "--occurrences", t / "check.jsonl"});
  CHECK(many.code == 0);
  CHECK(many.out == "PATH\tp\tF.java:1\turlPath\nPORT\tp\tF.java:1\tport\n");
  CHECK(many.err.find("warning: F.java:1: predicted PATH, recorded URL: urlPath") !=
        std::string::npos);
  CHECK(many.err.find("recorded PORT") == std::string::npos);
}

TEST_CASE("evaluate needs two projects and reports per fold") {
  TempDir t("evaluate");
  std::vector<Occurrence> one = {occ("solo", "path", CType::PATH)};
  write_occurrences(t.path / "solo.jsonl", one);
  Run single = run_ctm({"evaluate", t / "solo.jsonl", "--out", t / "e1"});
  CHECK(single.code != 0);
  CHECK(single.err.find("two projects") != std::string::npos);

  fs::create_directories(t.path / "occ");
  for (const char* p : {"a", "b", "c"}) {
    std::vector<Occurrence> occs;
    for (int i = 0; i < 6; ++i) {
      occs.push_back(occ(p, "filePath", CType::PATH));
      occs.push_back(occ(p, "serverPort", CType::PORT));
    }
    write_occurrences(t.path / "occ" / (std::string(p) + ".jsonl"), occs);
  }
  std::ofstream(t / "occ/d.jsonl") << "";
  Run r = run_ctm({"evaluate", t / "occ", "--out", t / "e3"});
  CHECK(r.code == 0);
  std::string folds = slurp(t.path / "e3/folds.tsv");
  CHECK(folds == "held_out\ttrain\ttest\tleaves\tflag\n"
                 "a\t24\t12\t2\t\n"
                 "b\t24\t12\t2\t\n"
                 "c\t24\t12\t2\t\n"
                 "d\t36\t0\t0\tempty_test\n");
  CHECK(slurp(t.path / "e3/metrics.tsv").find("Average\t100.0\t100.0\t100.0\t") != std::string::npos);
  CHECK(fs::exists(t.path / "e3/confusion.txt"));
}

TEST_CASE("report writes rankings and the length histogram") {
  TempDir t("report");
  std::vector<Occurrence> occs;
  for (int i = 0; i < 3; ++i) occs.push_back(occ("p", "path", CType::PATH));
  occs.push_back(occ("p", "dir", CType::PATH));
  for (int i = 0; i < 5; ++i) occs.push_back(occ("p", "\"a.txt\"", CType::PATH));
  occs.push_back(occ("p", "file.getParent()", CType::PATH));
  write_occurrences(t.path / "p.jsonl", occs);
  REQUIRE(run_ctm({"report", t / "p.jsonl", "--out", t / "r", "--top", "2"}).code == 0);
  CHECK(slurp(t.path / "r/top_expressions.tsv") ==
        "ctype\tscope\trank\tcount\texpression\n"
        "PATH\t*\t1\t3\tpath\n"
        "PATH\t*\t2\t1\tdir\n"
        "PATH\tp\t1\t3\tpath\n"
        "PATH\tp\t2\t1\tdir\n");
  std::string lengths = slurp(t.path / "r/lengths.tsv");
  CHECK(lengths.find("PATH\t90.0\t10.0\t0.0") != std::string::npos);
  CHECK(slurp(t.path / "r/top_words.tsv").find("PATH\t1\t1\tpath\n") != std::string::npos);
}

TEST_CASE("every subcommand is byte-identical across runs") {
  TempDir t("determinism");
  std::map<std::string, std::string> first;
  for (int run = 0; run < 2; ++run) {
    fs::path base = t.path / ("run" + std::to_string(run));
    std::string b = base.string();
    REQUIRE(run_ctm({"generate", b + "/corpus", "--projects", "3", "--sites", "40"}).code == 0);
    REQUIRE(run_ctm({"extract", "--manifest", b + "/corpus/projects.tsv", "--out", b + "/occ"}).code == 0);
    REQUIRE(run_ctm({"train", b + "/occ", "--out", b + "/train"}).code == 0);
    REQUIRE(run_ctm({"evaluate", b + "/occ", "--out", b + "/eval"}).code == 0);
    REQUIRE(run_ctm({"report", b + "/occ", "--out", b + "/report"}).code == 0);
    Run p = run_ctm({"predict", b + "/train/tree.json", "--occurrences", b + "/occ/atlas.jsonl"});
    REQUIRE(p.code == 0);
    std::ofstream(base / "predict.txt") << p.out;

    auto snap = snapshot(base);
    // manifests hold absolute roots, which differ by run directory
    snap.erase("corpus/projects.tsv");
    if (run == 0) {
      first = snap;
      CHECK(first.size() > 20);
    } else {
      CHECK(snap == first);
    }
  }
}

TEST_CASE("the file pipeline matches the in-process pipeline") {
  TempDir t("pipeline");
  auto corpus = generate_corpus(GeneratorConfig{3, 40, 10});
  write_corpus(t.path / "corpus", corpus);
  REQUIRE(run_ctm({"extract", "--manifest", t / "corpus/projects.tsv", "--out", t / "occ"}).code == 0);
  REQUIRE(run_ctm({"evaluate", t / "occ", "--out", t / "eval"}).code == 0);

  Registry reg = load_registry(default_registry_path());
  std::vector<Occurrence> all;
  for (const auto& p : corpus) {
    auto r = scan_sources(p.files, reg, p.name);
    all.insert(all.end(), r.occurrences.begin(), r.occurrences.end());
  }
  EvaluationResult in_process = evaluate_lopo(all);
  CHECK(slurp(t.path / "eval/metrics.tsv") == format_metrics_tsv(in_process.metrics));
  CHECK(slurp(t.path / "eval/confusion.tsv") == format_confusion_tsv(in_process.matrix));
}

TEST_CASE("usage errors") {
  CHECK(run_ctm({}).code != 0);
  CHECK(run_ctm({"bogus"}).code != 0);
  CHECK(run_ctm({"--help"}).code == 0);
}
