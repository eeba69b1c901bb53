#include "ctm/extract.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>
#include <tuple>

#include "ctm/lexer.hpp"
#include "ctm/package_tree.hpp"
#include "ctm/parser.hpp"
#include "ctm/resolver.hpp"
#include "ctm/table.hpp"

namespace ctm {
namespace {

namespace fs = std::filesystem;

struct ParsedFile {
  const SourceFile* source = nullptr;
  std::optional<CompilationUnit> unit;
  std::string error;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers; results keep index
/// order.
template <class Fn>
auto parallel_map(std::size_t n, unsigned threads, Fn fn) {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::size_t workers = std::min<std::size_t>(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

/// Walks one compilation unit and records occurrences for registry hits.
class FileScanner {
 public:
  FileScanner(const PackageTree& tree, const Registry& registry, const CompilationUnit& unit,
              const SourceFile& source, const std::string& project, SegmentationMode mode)
      : registry_(registry),
        unit_(unit),
        source_(source),
        project_(project),
        mode_(mode),
        resolver_(tree, FileContext{unit.package_name, unit.imports}) {}

  std::vector<Occurrence> run() {
    for (const auto& td : unit_.type_decls) type_decl(td, true);
    return std::move(out_);
  }

 private:
  // Named types are in the package tree and become the resolution context;
  // anonymous and local classes keep the outer context and see their own
  // fields through a scope frame.
  void type_decl(const TypeDecl& td, bool named) {
    std::string saved = resolver_.enclosing();
    if (named) resolver_.set_enclosing(td.fq_name);
    scopes_.push();
    if (!named) {
      for (const auto& f : td.fields) scopes_.declare(f.name, resolver_.declared_type(f.type, nullptr));
    }
    for (const auto& f : td.fields) {
      if (f.has_init) expr(f.init);
    }
    for (const auto& init : td.initializers) {
      scopes_.push();
      for (const auto& s : init) stmt(s);
      scopes_.pop();
    }
    for (const auto& m : td.methods) {
      if (!m.has_body) continue;
      scopes_.push();
      for (const auto& p : m.params) scopes_.declare(p.name, p.type);
      for (const auto& s : m.body) stmt(s);
      scopes_.pop();
    }
    for (const auto& n : td.nested) type_decl(n, named);
    scopes_.pop();
    resolver_.set_enclosing(saved);
  }

  void declare(const LocalVar& v, const Expr* init) {
    scopes_.declare(v.name, resolver_.declared_type(v.type, init));
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::loop: {
        // classic for: children are [init, body]
        scopes_.push();
        std::size_t body = s.children.size() - 1;
        for (std::size_t i = 0; i < body; ++i) stmt(s.children[i]);
        for (const auto& e : s.exprs) expr(e);
        if (!s.children.empty()) stmt(s.children[body]);
        scopes_.pop();
        return;
      }
      case StmtKind::block:
      case StmtKind::switch_:
        for (const auto& e : s.exprs) expr(e);
        scopes_.push();
        for (const auto& c : s.children) stmt(c);
        scopes_.pop();
        return;
      case StmtKind::local_var:
        for (std::size_t i = 0; i < s.vars.size(); ++i) {
          bool has_init = i < s.var_has_init.size() && s.var_has_init[i];
          if (has_init) expr(s.exprs[i]);
          declare(s.vars[i], has_init ? &s.exprs[i] : nullptr);
        }
        return;
      case StmtKind::foreach:
        for (const auto& e : s.exprs) expr(e);
        scopes_.push();
        for (const auto& v : s.vars) declare(v, nullptr);
        for (const auto& c : s.children) stmt(c);
        scopes_.pop();
        return;
      case StmtKind::try_: {
        scopes_.push();
        std::size_t resources = s.vars.size();
        for (std::size_t i = 0; i < s.exprs.size(); ++i) {
          expr(s.exprs[i]);
          if (i < resources) declare(s.vars[i], &s.exprs[i]);
        }
        if (!s.children.empty()) stmt(s.children.front());
        scopes_.pop();
        for (std::size_t i = 1; i < s.children.size(); ++i) stmt(s.children[i]);
        return;
      }
      case StmtKind::catch_:
        scopes_.push();
        for (const auto& v : s.vars) declare(v, nullptr);
        for (const auto& c : s.children) stmt(c);
        scopes_.pop();
        return;
      case StmtKind::local_type:
        if (s.body) {
          for (const auto& td : s.body->types) type_decl(td, false);
        }
        return;
      default:
        for (const auto& e : s.exprs) expr(e);
        for (const auto& c : s.children) stmt(c);
        return;
    }
  }

  void expr(const Expr& e) {
    if (e.kind == ExprKind::method_call || e.kind == ExprKind::new_object) call_site(e);
    for (const auto& c : e.children) expr(c);
    if (!e.body) return;
    scopes_.push();
    for (const auto& p : e.body->params) scopes_.declare(p.name, p.type);
    for (const auto& s : e.body->stmts) stmt(s);
    for (const auto& td : e.body->types) type_decl(td, false);
    scopes_.pop();
  }

  void call_site(const Expr& call) {
    const RegistryEntry* hit = lookup(registry_, resolver_.resolve_call(call, scopes_));
    if (!hit) return;
    auto args = call.arguments();
    for (std::size_t i = 0; i < args.size(); ++i) {
      const Expr& a = *args[i];
      Occurrence o;
      o.project = project_;
      o.file = source_.path;
      o.line = a.pos.line;
      o.callee = hit->method;
      o.arg_pos = i;
      o.label = hit->label_at(i);
      o.expr = std::make_shared<const Expr>(a);
      o.expr_text = normalized_span(source_.text, a.pos.begin, a.pos.end);
      o.features = featurize(a, mode_);
      out_.push_back(std::move(o));
    }
  }

  const Registry& registry_;
  const CompilationUnit& unit_;
  const SourceFile& source_;
  const std::string& project_;
  SegmentationMode mode_;
  Resolver resolver_;
  ScopeTable scopes_;
  std::vector<Occurrence> out_;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read failed: " + p.string());
  return ss.str();
}

std::string bundled_signatures() {
  try {
    return read_file(default_signatures_path());
  } catch (const std::exception&) {
    return {};
  }
}

}  // namespace

ScanResult scan_sources(const std::vector<SourceFile>& files, const Registry& registry,
                        const std::string& project_name, const ScanOptions& options) {
  ScanResult result;
  auto parsed = parallel_map(files.size(), options.threads, [&](std::size_t i) {
    ParsedFile pf;
    pf.source = &files[i];
    try {
      pf.unit = parse_source(files[i].text, files[i].path);
    } catch (const SyntaxError& e) {
      pf.error = files[i].path + ":" + e.what();
    }
    return pf;
  });

  std::vector<CompilationUnit> units;
  std::vector<const ParsedFile*> ok;
  for (const auto& pf : parsed) {
    if (pf.unit) {
      units.push_back(*pf.unit);
      ok.push_back(&pf);
    } else {
      result.diagnostics.push_back(pf.error);
      ++result.files_failed;
    }
  }
  result.files_scanned = ok.size();

  std::string sigs = options.signatures ? *options.signatures : bundled_signatures();
  PackageTree tree = build_package_tree(
      units, sigs.empty() ? std::nullopt : std::optional<std::string_view>(sigs));
  for (const auto& d : tree.diagnostics()) result.diagnostics.push_back(d);

  auto per_file = parallel_map(ok.size(), options.threads, [&](std::size_t i) {
    FileScanner scanner(tree, registry, *ok[i]->unit, *ok[i]->source, project_name, options.mode);
    return scanner.run();
  });
  for (auto& occs : per_file) {
    for (auto& o : occs) result.occurrences.push_back(std::move(o));
  }
  std::stable_sort(result.occurrences.begin(), result.occurrences.end(),
                   [](const Occurrence& a, const Occurrence& b) {
                     return std::tie(a.file, a.line, a.arg_pos) < std::tie(b.file, b.line, b.arg_pos);
                   });
  return result;
}

ScanResult scan_project(const fs::path& root, const Registry& registry,
                        const std::string& project_name, const ScanOptions& options) {
  if (!fs::is_directory(root)) {
    throw fs::filesystem_error("project root is not a directory", root,
                               std::make_error_code(std::errc::not_a_directory));
  }
  std::vector<fs::path> paths;
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file() && it->path().extension() == ".java") paths.push_back(it->path());
  }
  std::sort(paths.begin(), paths.end());

  std::vector<SourceFile> files;
  std::vector<std::string> read_errors;
  for (const auto& p : paths) {
    std::string rel = fs::relative(p, root).generic_string();
    try {
      files.push_back(SourceFile{rel, read_file(p)});
    } catch (const std::exception& e) {
      read_errors.push_back(rel + ": " + e.what());
    }
  }
  ScanResult result = scan_sources(files, registry, project_name, options);
  result.files_failed += read_errors.size();
  result.diagnostics.insert(result.diagnostics.begin(), read_errors.begin(), read_errors.end());
  return result;
}

std::size_t CountTable::sum(const CTypeCounts& c) {
  std::size_t n = 0;
  for (auto v : c) n += v;
  return n;
}

CTypeCounts CountTable::totals() const {
  CTypeCounts t{};
  for (const auto& [p, c] : rows) {
    for (std::size_t i = 0; i < kCTypeCount; ++i) t[i] += c[i];
  }
  return t;
}

CountTable tabulate_counts(const std::vector<Occurrence>& occs) {
  CountTable t;
  for (const auto& o : occs) {
    auto [it, _] = t.rows.try_emplace(o.project, CTypeCounts{});
    ++it->second[index_of(o.label)];
  }
  return t;
}

namespace {

TextTable count_rows(const CountTable& table) {
  TextTable rows;
  std::vector<std::string> header{"project"};
  for (CType c : kAllCTypes) header.emplace_back(to_string(c));
  header.emplace_back("All");
  rows.push_back(std::move(header));
  auto add = [&](const std::string& name, const CTypeCounts& c) {
    std::vector<std::string> row{name};
    for (auto v : c) row.push_back(std::to_string(v));
    row.push_back(std::to_string(CountTable::sum(c)));
    rows.push_back(std::move(row));
  };
  for (const auto& [p, c] : table.rows) add(p, c);
  add("Total", table.totals());
  return rows;
}

}  // namespace

std::string format_counts_tsv(const CountTable& table) { return format_tsv(count_rows(table)); }
std::string format_counts_text(const CountTable& table) { return format_aligned(count_rows(table)); }

}  // namespace ctm
