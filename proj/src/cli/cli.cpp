#include "ctm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "ctm/eval.hpp"
#include "ctm/extract.hpp"
#include "ctm/generator.hpp"
#include "ctm/id3.hpp"
#include "ctm/parser.hpp"
#include "ctm/registry.hpp"

namespace ctm {
namespace {

namespace fs = std::filesystem;

class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CommandError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw CommandError("cannot write " + p.string());
}

/// `<out>/<command>.log`: a timestamped header line, then deterministic
/// messages.
class Log {
 public:
  Log(const fs::path& dir, const std::string& command, std::ostream& err)
      : path_(dir / (command + ".log")), err_(err) {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << "# ctm " << command << " " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << "\n";
    text_ = ss.str();
  }
  ~Log() {
    std::ofstream out(path_, std::ios::binary);
    out << text_;
  }

  void info(const std::string& line) { text_ += line + "\n"; }
  void warn(const std::string& line) {
    text_ += "warning: " + line + "\n";
    err_ << "warning: " << line << "\n";
  }

 private:
  fs::path path_;
  std::ostream& err_;
  std::string text_;
};

SegmentationMode parse_mode(const std::string& s) {
  if (s == "literal") return SegmentationMode::literal;
  if (s == "camel") return SegmentationMode::camel;
  throw CommandError("unknown segmentation mode " + s);
}

/// Occurrence files, with directories expanded to their *.jsonl files.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

struct LoadedCorpus {
  std::vector<Occurrence> occurrences;
  std::vector<std::string> empty_projects;  // stems of files without occurrences
};

LoadedCorpus load_inputs(const std::vector<std::string>& inputs) {
  LoadedCorpus c;
  for (const auto& f : expand_inputs(inputs)) {
    std::vector<Occurrence> occs;
    try {
      occs = read_occurrences(f);
    } catch (const OccurrenceFormatError& e) {
      throw CommandError(f.string() + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw CommandError(e.what());
    }
    if (occs.empty()) c.empty_projects.push_back(f.stem().string());
    c.occurrences.insert(c.occurrences.end(), std::make_move_iterator(occs.begin()),
                         std::make_move_iterator(occs.end()));
  }
  return c;
}

Registry load_registry_checked(const fs::path& p) {
  try {
    return load_registry(p);
  } catch (const RegistryError& e) {
    throw CommandError(p.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw CommandError(e.what());
  }
}

DecisionTree load_tree(const fs::path& p) {
  std::string text = read_text(p);
  std::string t = trim(text);
  try {
    return !t.empty() && t.front() == '{' ? tree_from_json(text) : tree_from_rules(text);
  } catch (const std::exception& e) {
    throw CommandError(p.string() + ": " + e.what());
  }
}

struct Options {
  std::string registry;
  std::string signatures;
  std::size_t min_items = 10;
  std::string segmentation = "literal";
  std::string out = ".";
};

RunConfig make_config(const Options& o) {
  RunConfig c;
  c.registry_path = o.registry.empty() ? default_registry_path() : fs::path(o.registry);
  if (o.min_items < 1) throw CommandError("--min-items must be at least 1");
  c.min_items = o.min_items;
  c.segmentation = parse_mode(o.segmentation);
  c.output_dir = o.out;
  return c;
}

int cmd_extract(const RunConfig& config, const std::string& signatures, unsigned threads,
                std::ostream& out, std::ostream& err) {
  if (config.projects.empty()) throw CommandError("no projects given");
  std::set<std::string> names;
  for (const auto& p : config.projects) {
    if (!names.insert(p.name).second) throw CommandError("duplicate project name " + p.name);
  }
  Registry registry = load_registry_checked(config.registry_path);
  fs::create_directories(config.output_dir);
  Log log(config.output_dir, "extract", err);
  log.info("registry " + std::to_string(registry.size()) + " entries");

  ScanOptions options;
  options.mode = config.segmentation;
  options.threads = threads;
  if (!signatures.empty()) options.signatures = read_text(signatures);

  std::vector<Occurrence> all;
  std::size_t failed = 0;
  for (const auto& p : config.projects) {
    ScanResult r;
    try {
      r = scan_project(p.root, registry, p.name, options);
    } catch (const std::exception& e) {
      ++failed;
      log.warn("project " + p.name + " failed: " + e.what());
      continue;
    }
    for (const auto& d : r.diagnostics) log.warn(p.name + ": " + d);
    log.info("project " + p.name + ": " + std::to_string(r.files_scanned) + " files scanned, " +
             std::to_string(r.files_failed) + " skipped, " +
             std::to_string(r.occurrences.size()) + " occurrences");
    write_occurrences(config.output_dir / (p.name + ".jsonl"), r.occurrences);
    all.insert(all.end(), r.occurrences.begin(), r.occurrences.end());
  }
  if (failed == config.projects.size()) {
    err << "error: every project failed\n";
    return 1;
  }
  CountTable table = tabulate_counts(all);
  write_text(config.output_dir / "counts.tsv", format_counts_tsv(table));
  write_text(config.output_dir / "counts.txt", format_counts_text(table));
  out << format_counts_text(table);
  return 0;
}

std::vector<Sample> samples_of(const std::vector<Occurrence>& occs, SegmentationMode mode) {
  std::vector<Sample> out;
  out.reserve(occs.size());
  for (const auto& o : occs) out.push_back(Sample{featurize(o, mode), o.label});
  return out;
}

int cmd_train(const RunConfig& config, const std::vector<std::string>& inputs, std::ostream& out,
              std::ostream& err) {
  LoadedCorpus corpus = load_inputs(inputs);
  if (corpus.occurrences.empty()) {
    err << "error: no training data\n";
    return 1;
  }
  fs::create_directories(config.output_dir);
  Log log(config.output_dir, "train", err);
  DecisionTree tree = id3_train(samples_of(corpus.occurrences, config.segmentation),
                                LearnerConfig{config.min_items});
  log.info("samples " + std::to_string(corpus.occurrences.size()) + ", min_items " +
           std::to_string(config.min_items));
  log.info("tree depth " + std::to_string(tree.depth()) + ", leaves " +
           std::to_string(tree.leaf_count()));
  std::string rules = tree_to_rules(tree);
  write_text(config.output_dir / "tree.json", tree_to_json(tree) + "\n");
  write_text(config.output_dir / "rules.txt", rules);
  out << rules;
  return 0;
}

int cmd_predict(const RunConfig& config, const std::string& tree_file, const std::string& expr,
                const std::string& occ_file, std::ostream& out, std::ostream& err) {
  DecisionTree tree = load_tree(tree_file);
  if (!expr.empty() == !occ_file.empty())
    throw CommandError("give exactly one of --expr and --occurrences");
  if (!expr.empty()) {
    Expr e;
    try {
      e = parse_expression(expr);
    } catch (const SyntaxError& se) {
      err << "error: cannot parse expression: " << se.what() << "\n";
      return 1;
    }
    out << to_string(classify(tree, featurize(e, config.segmentation))) << "\n";
    return 0;
  }
  LoadedCorpus corpus = load_inputs({occ_file});
  std::size_t mismatches = 0;
  for (const auto& o : corpus.occurrences) {
    CType p = classify(tree, featurize(o, config.segmentation));
    out << to_string(p) << "\t" << o.project << "\t" << o.file << ":" << o.line << "\t"
        << o.expr_text << "\n";
    if (p != o.label) {
      ++mismatches;
      err << "warning: " << o.file << ":" << o.line << ": predicted " << to_string(p)
          << ", recorded " << to_string(o.label) << ": " << o.expr_text << "\n";
    }
  }
  err << mismatches << " of " << corpus.occurrences.size() << " predictions differ\n";
  return 0;
}

int cmd_evaluate(const RunConfig& config, const std::vector<std::string>& inputs,
                 std::ostream& out, std::ostream& err) {
  LoadedCorpus corpus = load_inputs(inputs);
  EvaluationResult r;
  try {
    r = evaluate_lopo(corpus.occurrences,
                      EvalConfig{LearnerConfig{config.min_items}, config.segmentation},
                      corpus.empty_projects);
  } catch (const EvaluationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  fs::create_directories(config.output_dir);
  Log log(config.output_dir, "evaluate", err);
  for (const auto& f : r.folds) {
    if (f.empty_test) log.warn("project " + f.held_out + " has no occurrences to test");
  }
  log.info("folds " + std::to_string(r.folds.size()) + ", predictions " +
           std::to_string(r.pairs.size()));
  write_text(config.output_dir / "metrics.tsv", format_metrics_tsv(r.metrics));
  write_text(config.output_dir / "metrics.txt", format_metrics_text(r.metrics));
  write_text(config.output_dir / "confusion.tsv", format_confusion_tsv(r.matrix));
  write_text(config.output_dir / "confusion.txt", format_confusion_text(r.matrix));
  write_text(config.output_dir / "folds.tsv", format_folds_tsv(r.folds));
  out << format_metrics_text(r.metrics) << "\n" << format_confusion_text(r.matrix);
  return 0;
}

int cmd_report(const RunConfig& config, const std::vector<std::string>& inputs, std::size_t top,
               std::ostream& out, std::ostream& err) {
  LoadedCorpus corpus = load_inputs(inputs);
  fs::create_directories(config.output_dir);
  Log log(config.output_dir, "report", err);
  log.info("occurrences " + std::to_string(corpus.occurrences.size()));
  const auto& occs = corpus.occurrences;
  CountTable counts = tabulate_counts(occs);
  std::string exprs, words;
  for (CType c : kAllCTypes) {
    std::string e = format_top_expressions_tsv(c, report_top_expressions(occs, c, top));
    std::string w = format_top_words_tsv(c, top_words(occs, c));
    // keep a single header line per file
    exprs += exprs.empty() ? e : e.substr(e.find('\n') + 1);
    words += words.empty() ? w : w.substr(w.find('\n') + 1);
  }
  LengthHistogram h = report_length_histogram(occs);
  write_text(config.output_dir / "counts.tsv", format_counts_tsv(counts));
  write_text(config.output_dir / "top_expressions.tsv", exprs);
  write_text(config.output_dir / "top_words.tsv", words);
  write_text(config.output_dir / "lengths.tsv", format_histogram_tsv(h));
  write_text(config.output_dir / "lengths.txt", format_histogram_text(h));
  out << format_counts_text(counts) << "\n" << format_histogram_text(h);
  return 0;
}

int cmd_generate(const fs::path& dir, const GeneratorConfig& g, std::ostream& out) {
  auto corpus = generate_corpus(g);
  write_corpus(dir, corpus);
  std::size_t sites = 0;
  for (const auto& p : corpus) sites += p.call_sites;
  out << corpus.size() << " projects, " << sites << " call sites written to " << dir.string()
      << "\n";
  return 0;
}

}  // namespace

ProjectSpec parse_project_spec(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw std::invalid_argument("project spec must be name=path: " + text);
  return ProjectSpec{text.substr(0, eq), text.substr(eq + 1)};
}

std::vector<ProjectSpec> read_manifest(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot read manifest " + file.string());
  std::vector<ProjectSpec> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string::npos)
      throw std::invalid_argument(file.string() + ":" + std::to_string(n) + ": expected name<TAB>path");
    fs::path root = trim(t.substr(tab + 1));
    if (root.is_relative()) root = file.parent_path() / root;
    out.push_back(ProjectSpec{trim(t.substr(0, tab)), root});
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"c-type extraction and classification for Java sources", "ctm"};
  app.require_subcommand(1);
  Options opt;
  auto common = [&](CLI::App* sub, bool learner) {
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--segmentation", opt.segmentation, "literal or camel")
        ->check(CLI::IsMember({"literal", "camel"}))
        ->capture_default_str();
    if (learner)
      sub->add_option("--min-items", opt.min_items, "ID3 minimum node size")->capture_default_str();
  };

  std::vector<std::string> specs;
  std::string manifest;
  unsigned threads = 0;
  auto* extract = app.add_subcommand("extract", "scan projects and write occurrences");
  extract->add_option("projects", specs, "name=path project specs");
  extract->add_option("--manifest", manifest, "file with one name<TAB>path per line");
  extract->add_option("--registry", opt.registry, "method registry (default: bundled)");
  extract->add_option("--signatures", opt.signatures, "signature list (default: bundled)");
  extract->add_option("--threads", threads, "worker threads, 0 for all cores");
  common(extract, false);

  std::vector<std::string> inputs;
  auto* train = app.add_subcommand("train", "train a decision tree on occurrence files");
  train->add_option("inputs", inputs, "occurrence files or directories")->required();
  common(train, true);

  std::string tree_file, expr, occ_file;
  auto* predict = app.add_subcommand("predict", "classify an expression or an occurrence file");
  predict->add_option("tree", tree_file, "tree.json or rules.txt")->required();
  predict->add_option("--expr", expr, "Java expression");
  predict->add_option("--occurrences", occ_file, "occurrence file");
  predict->add_option("--segmentation", opt.segmentation, "literal or camel")
      ->check(CLI::IsMember({"literal", "camel"}));

  auto* evaluate = app.add_subcommand("evaluate", "leave-one-project-out evaluation");
  evaluate->add_option("inputs", inputs, "occurrence files or directories")->required();
  common(evaluate, true);

  std::size_t top = 10;
  auto* report = app.add_subcommand("report", "counts, top expressions, top words, lengths");
  report->add_option("inputs", inputs, "occurrence files or directories")->required();
  report->add_option("--top", top, "entries per ranking")->capture_default_str();
  common(report, false);

  GeneratorConfig gen;
  std::string gen_dir;
  auto* generate = app.add_subcommand("generate", "write the synthetic benchmark corpus");
  generate->add_option("dir", gen_dir, "output directory")->required();
  generate->add_option("--projects", gen.projects)->capture_default_str()->check(CLI::Range(1, 64));
  generate->add_option("--sites", gen.sites_per_project, "call sites per project")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    RunConfig config = make_config(opt);
    if (*extract) {
      if (!manifest.empty()) config.projects = read_manifest(manifest);
      for (const auto& s : specs) config.projects.push_back(parse_project_spec(s));
      return cmd_extract(config, opt.signatures, threads, out, err);
    }
    if (*train) return cmd_train(config, inputs, out, err);
    if (*predict) return cmd_predict(config, tree_file, expr, occ_file, out, err);
    if (*evaluate) return cmd_evaluate(config, inputs, out, err);
    if (*report) return cmd_report(config, inputs, top, out, err);
    if (*generate) return cmd_generate(gen_dir, gen, out);
  } catch (const CommandError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ctm
