#include <doctest.h>

#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>

#include "ctm/extract.hpp"
#include "ctm/features.hpp"
#include "ctm/parser.hpp"
#include "ctm/registry.hpp"

using namespace ctm;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = CTM_FIXTURE_DIR;

const Registry& bundled() {
  static const Registry r = load_registry(default_registry_path());
  return r;
}

using Row = std::tuple<std::string, int, std::size_t, std::string, std::string>;

std::vector<Row> rows(const std::vector<Occurrence>& occs) {
  std::vector<Row> out;
  for (const auto& o : occs)
    out.emplace_back(o.file, o.line, o.arg_pos, std::string(to_string(o.label)), o.expr_text);
  return out;
}

std::set<std::string> set_of(std::initializer_list<const char*> xs) {
  return std::set<std::string>(xs.begin(), xs.end());
}

}  // namespace

TEST_CASE("new File(config.getPath(i)) yields one PATH occurrence") {
  ScanResult r = scan_project(kFixtures / "config_path", bundled(), "config_path");
  CHECK(r.diagnostics.empty());
  CHECK(r.files_scanned == 2);
  REQUIRE(r.occurrences.size() == 1);
  const Occurrence& o = r.occurrences.front();
  CHECK(o.project == "config_path");
  CHECK(o.file == "src/app/Loader.java");
  CHECK(o.line == 7);
  CHECK(o.callee.text() == "java.io.File.<init>(LString;)V");
  CHECK(o.arg_pos == 0);
  CHECK(o.label == CType::PATH);
  CHECK(o.expr_text == "config.getPath(i)");

  RankedIdentifiers ids = rank_identifiers(build_dependency_graph(*o.expr));
  CHECK(ids.primary == set_of({"getPath"}));
  CHECK(ids.secondary == set_of({"config", "i"}));
  CHECK(ids.ternary.empty());
  REQUIRE(o.features);
  CHECK(o.features->primary_first == set_of({"get"}));
  CHECK(o.features->primary_last == set_of({"path"}));
  CHECK(o.features->secondary_first == set_of({"config", "i"}));
  CHECK(o.features->secondary_last == set_of({"config", "i"}));
}

TEST_CASE("new File(path) after string concatenation") {
  ScanResult r = scan_project(kFixtures / "primitive", bundled(), "home");
  REQUIRE(r.occurrences.size() == 1);
  CHECK(rows(r.occurrences).front() == Row{"src/home/UserConfig.java", 10, 0, "PATH", "path"});
}

TEST_CASE("mixed project: every argument of a matched call, sorted by location") {
  ScanResult r = scan_project(kFixtures / "mixed", bundled(), "mixed");
  CHECK(r.files_scanned == 2);
  CHECK(r.files_failed == 1);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics.front().rfind("src/gui/Broken.java:4:", 0) == 0);

  std::vector<Row> expected = {
      {"src/gui/Panel.java", 8, 0, "WIDTH", "w"},
      {"src/gui/Panel.java", 8, 1, "HEIGHT", "h"},
      {"src/gui/Panel.java", 12, 0, "XCOORD", "left"},
      {"src/gui/Panel.java", 12, 1, "YCOORD", "top"},
      {"src/gui/Panel.java", 12, 2, "WIDTH", "width"},
      {"src/gui/Panel.java", 12, 3, "HEIGHT", "height"},
      {"src/gui/Panel.java", 13, 0, "XCOORD", "left + 1"},
      {"src/gui/Panel.java", 13, 1, "YCOORD", "top + 1"},
      {"src/gui/Panel.java", 13, 2, "WIDTH", "width - 2"},
      {"src/gui/Panel.java", 13, 3, "HEIGHT", "height - 2"},
      {"src/net/demo/Client.java", 16, 0, "HOST", "serverHost"},
      {"src/net/demo/Client.java", 16, 1, "PORT", "serverPort"},
      {"src/net/demo/Client.java", 21, 0, "OTHER", "baseDir"},
      {"src/net/demo/Client.java", 21, 1, "PATH", "name + \".txt\""},
      {"src/net/demo/Client.java", 24, 0, "PATH", "n"},
  };
  CHECK(rows(r.occurrences) == expected);
  CHECK(r.occurrences[12].callee.text() == "java.io.File.<init>(LFile;LString;)V");
  CHECK(r.occurrences[6].callee.text() == "java.awt.Rectangle.setBounds(IIII)V");
}

TEST_CASE("labels agree with the registry and texts re-parse to the same tree") {
  for (const char* p : {"config_path", "primitive", "mixed"}) {
    ScanResult r = scan_project(kFixtures / p, bundled(), p);
    for (const auto& o : r.occurrences) {
      const RegistryEntry* e = bundled().find(o.callee);
      REQUIRE(e);
      CHECK(o.label == e->label_at(o.arg_pos));
      CHECK(o.arg_pos < descriptor_arity(o.callee.descriptor));
      CHECK(same_structure(parse_expression(o.expr_text), *o.expr));
    }
  }
}

TEST_CASE("no registry calls gives nothing") {
  std::vector<SourceFile> files = {
      {"A.java", "class A { int f(String s) { return s.length() + Math.abs(-1); } }"}};
  CHECK(scan_sources(files, bundled(), "p").occurrences.empty());
  CHECK(scan_sources({}, bundled(), "p").occurrences.empty());
}

TEST_CASE("nested matched calls each produce occurrences") {
  std::vector<SourceFile> files = {{"N.java", R"(
import java.io.File;
class N {
  void f(String dir, String name) {
    new File(new File(dir, name).getPath());
  }
})"}};
  auto occs = scan_sources(files, bundled(), "p").occurrences;
  std::vector<Row> expected = {
      {"N.java", 5, 0, "PATH", "new File(dir, name).getPath()"},
      {"N.java", 5, 0, "PATH", "dir"},
      {"N.java", 5, 1, "PATH", "name"},
  };
  CHECK(rows(occs) == expected);
}

TEST_CASE("locals, parameters and lambda parameters steer overload choice") {
  std::vector<SourceFile> files = {{"S.java", R"(
import java.net.InetAddress;
import java.net.Socket;
class S {
  void f(InetAddress addr, String host) {
    int port = 80;
    new Socket(addr, port);
    new Socket(host, port);
    Runnable r = () -> { String addr2 = host; new Socket(addr2, 1); };
  }
})"}};
  auto occs = scan_sources(files, bundled(), "p").occurrences;
  REQUIRE(occs.size() == 6);
  CHECK(occs[0].callee.text() == "java.net.Socket.<init>(LInetAddress;I)V");
  CHECK(occs[0].label == CType::OTHER);
  CHECK(occs[1].label == CType::PORT);
  CHECK(occs[2].callee.text() == "java.net.Socket.<init>(LString;I)V");
  CHECK(occs[2].label == CType::HOST);
  CHECK(occs[4].callee.text() == "java.net.Socket.<init>(LString;I)V");
}

TEST_CASE("scanning is deterministic across runs and thread counts") {
  ScanOptions one;
  one.threads = 1;
  ScanOptions many;
  many.threads = 8;
  auto a = scan_project(kFixtures / "mixed", bundled(), "mixed", one);
  auto b = scan_project(kFixtures / "mixed", bundled(), "mixed", many);
  auto c = scan_project(kFixtures / "mixed", bundled(), "mixed", many);
  CHECK(occurrences_to_jsonl(a.occurrences) == occurrences_to_jsonl(b.occurrences));
  CHECK(occurrences_to_jsonl(b.occurrences) == occurrences_to_jsonl(c.occurrences));
  CHECK(a.diagnostics == b.diagnostics);
}

TEST_CASE("missing root throws") {
  CHECK_THROWS_AS(scan_project(kFixtures / "no_such_dir", bundled(), "x"), fs::filesystem_error);
}

TEST_CASE("paired coordinate entries give equal counts on random corpora") {
  Registry reg = parse_registry(
      "geo.Shape.<init>(IIII)V 0=XCOORD 1=YCOORD 2=WIDTH 3=HEIGHT\n"
      "geo.Shape.moveTo(II)V 0=XCOORD 1=YCOORD\n"
      "geo.Shape.resize(II)V 0=WIDTH 1=HEIGHT\n");
  const std::string shape = R"(package geo;
public class Shape {
  public Shape(int x, int y, int w, int h) {}
  public void moveTo(int x, int y) {}
  public void resize(int w, int h) {}
  public void rotate(int a) {}
}
)";
  std::mt19937 rng(7);
  const char* calls[] = {"new Shape(a, b, c, d)", "s.moveTo(a, b)", "s.resize(c, d)",
                         "s.rotate(a)", "Math.max(a, b)"};
  for (int round = 0; round < 20; ++round) {
    std::vector<SourceFile> files = {{"geo/Shape.java", shape}};
    std::map<CType, std::size_t> brute;
    int nfiles = 1 + static_cast<int>(rng() % 4);
    for (int f = 0; f < nfiles; ++f) {
      std::string body;
      int n = static_cast<int>(rng() % 12);
      for (int k = 0; k < n; ++k) {
        std::size_t pick = rng() % 5;
        body += "    " + std::string(calls[pick]) + ";\n";
        if (pick == 0) {
          for (CType t : {CType::XCOORD, CType::YCOORD, CType::WIDTH, CType::HEIGHT}) ++brute[t];
        } else if (pick == 1) {
          ++brute[CType::XCOORD];
          ++brute[CType::YCOORD];
        } else if (pick == 2) {
          ++brute[CType::WIDTH];
          ++brute[CType::HEIGHT];
        }
      }
      files.push_back({"geo/U" + std::to_string(f) + ".java",
                       "package geo;\nclass U" + std::to_string(f) +
                           " {\n  void f(Shape s, int a, int b, int c, int d) {\n" + body +
                           "  }\n}\n"});
    }
    auto occs = scan_sources(files, reg, "p", ScanOptions{SegmentationMode::literal, "", 0})
                    .occurrences;
    CountTable t = tabulate_counts(occs);
    CTypeCounts tot = t.totals();
    CHECK(tot[index_of(CType::XCOORD)] == tot[index_of(CType::YCOORD)]);
    CHECK(tot[index_of(CType::WIDTH)] == tot[index_of(CType::HEIGHT)]);
    for (CType c : {CType::XCOORD, CType::YCOORD, CType::WIDTH, CType::HEIGHT})
      CHECK(tot[index_of(c)] == brute[c]);
    CHECK(CountTable::sum(tot) == occs.size());
  }
}

TEST_CASE("count table") {
  Occurrence a;
  a.project = "p";
  a.label = CType::PATH;
  Occurrence b = a;
  b.label = CType::OTHER;
  CountTable t = tabulate_counts({a, b});
  REQUIRE(t.rows.size() == 1);
  const CTypeCounts& row = t.rows.at("p");
  CHECK(row[index_of(CType::PATH)] == 1);
  CHECK(row[index_of(CType::OTHER)] == 1);
  CHECK(CountTable::sum(row) == 2);

  std::string tsv = format_counts_tsv(t);
  CHECK(tsv ==
        "project\tPATH\tURL\tSQL\tHOST\tPORT\tXCOORD\tYCOORD\tWIDTH\tHEIGHT\tYEAR\tMONTH\tDAY\tOTHER\tAll\n"
        "p\t1\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t1\t2\n"
        "Total\t1\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t1\t2\n");

  CountTable empty = tabulate_counts({});
  CHECK(empty.rows.empty());
  CHECK(CountTable::sum(empty.totals()) == 0);
  CHECK(format_counts_text(empty).find("Total") != std::string::npos);
}

TEST_CASE("JSON lines round trip") {
  auto occs = scan_project(kFixtures / "mixed", bundled(), "mixed").occurrences;
  std::string text = occurrences_to_jsonl(occs);
  auto back = occurrences_from_jsonl(text);
  REQUIRE(back.size() == occs.size());
  for (std::size_t i = 0; i < occs.size(); ++i) {
    CHECK(back[i].project == occs[i].project);
    CHECK(back[i].file == occs[i].file);
    CHECK(back[i].line == occs[i].line);
    CHECK(back[i].callee == occs[i].callee);
    CHECK(back[i].arg_pos == occs[i].arg_pos);
    CHECK(back[i].label == occs[i].label);
    CHECK(back[i].features == occs[i].features);
    CHECK(same_structure(*back[i].expr, *occs[i].expr));
  }
  CHECK(occurrences_to_jsonl(back) == text);

  CHECK(occurrence_to_json(occs.front()) ==
        R"({"project":"mixed","file":"src/gui/Panel.java","line":8,)"
        R"("callee":"java.awt.Dimension.<init>(II)V","arg_pos":0,"label":"WIDTH","expr_text":"w",)"
        R"("features":{"primary_first_words":["w"],"primary_last_words":["w"],)"
        R"("secondary_first_words":[],"secondary_last_words":[]}})");
}

TEST_CASE("malformed JSON lines report their line") {
  std::string good =
      R"({"project":"p","file":"F.java","line":1,"callee":"java.io.File.<init>(LString;)V",)"
      R"("arg_pos":0,"label":"PATH","expr_text":"path","features":null})";
  CHECK(occurrences_from_jsonl(good + "\n\n" + good + "\n").size() == 2);
  try {
    occurrences_from_jsonl(good + "\n{oops\n");
    FAIL("expected an error");
  } catch (const OccurrenceFormatError& e) {
    CHECK(e.line() == 2);
  }
  std::string bad_label = good;
  bad_label.replace(bad_label.find("PATH"), 4, "COLOR");
  CHECK_THROWS_AS(occurrence_from_json(bad_label), OccurrenceFormatError);
  std::string bad_expr = good;
  bad_expr.replace(bad_expr.find("\"path\""), 6, "\"a +\"");
  CHECK_THROWS_AS(occurrence_from_json(bad_expr), OccurrenceFormatError);
}

TEST_CASE("top words count distinct projects") {
  auto make = [](const std::string& project, const std::string& text, CType label) {
    Occurrence o;
    o.project = project;
    o.label = label;
    o.expr = std::make_shared<const Expr>(parse_expression(text));
    o.expr_text = text;
    return o;
  };
  std::vector<Occurrence> occs = {make("a", "path", CType::PATH), make("b", "filePath", CType::PATH),
                                  make("b", "port", CType::PORT)};
  for (int i = 0; i < 10; ++i) occs.push_back(make("a", "dir", CType::PATH));
  auto words = top_words(occs, CType::PATH);
  REQUIRE(words.size() == 3);
  CHECK(words[0] == std::pair<std::string, std::size_t>{"path", 2});
  CHECK(words[1] == std::pair<std::string, std::size_t>{"dir", 1});
  CHECK(words[2] == std::pair<std::string, std::size_t>{"file", 1});
  CHECK(top_words(occs, CType::SQL).empty());
}
