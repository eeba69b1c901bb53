#include "ctm/generator.hpp"

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace ctm {
namespace {

namespace fs = std::filesystem;

enum class Slot {
  path, url, url_mixed, sql, host, port, x, y, width, height, year, month, day,
  parent, flag, protocol, resource,
};

struct CallKind {
  const char* text;  // {0}, {1}... mark argument slots
  std::vector<Slot> slots;
  const char* receiver;  // "Type name" parameter or empty
};

const std::vector<CallKind>& call_kinds() {
  static const std::vector<CallKind> kinds = {
      {"new File({0})", {Slot::path}, ""},
      {"new FileInputStream({0})", {Slot::path}, ""},
      {"new FileReader({0})", {Slot::path}, ""},
      {"new File({0}, {1})", {Slot::parent, Slot::path}, ""},
      {"new FileOutputStream({0}, {1})", {Slot::path, Slot::flag}, ""},
      {"new URL({0})", {Slot::url}, ""},
      {"URI.create({0})", {Slot::url}, ""},
      {"new URL({0}, {1}, {2}, {3})", {Slot::protocol, Slot::host, Slot::port, Slot::resource}, ""},
      {"stmt.executeQuery({0})", {Slot::sql}, "Statement stmt"},
      {"stmt.executeUpdate({0})", {Slot::sql}, "Statement stmt"},
      {"conn.prepareStatement({0})", {Slot::sql}, "Connection conn"},
      {"new Socket({0}, {1})", {Slot::host, Slot::port}, ""},
      {"new InetSocketAddress({0}, {1})", {Slot::host, Slot::port}, ""},
      {"new Rectangle({0}, {1}, {2}, {3})", {Slot::x, Slot::y, Slot::width, Slot::height}, ""},
      {"rect.setBounds({0}, {1}, {2}, {3})", {Slot::x, Slot::y, Slot::width, Slot::height},
       "Rectangle rect"},
      {"new Dimension({0}, {1})", {Slot::width, Slot::height}, ""},
      {"cal.set({0}, {1}, {2})", {Slot::year, Slot::month, Slot::day}, "Calendar cal"},
      {"LocalDate.of({0}, {1}, {2})", {Slot::year, Slot::month, Slot::day}, ""},
  };
  return kinds;
}

const std::map<Slot, std::vector<std::string>>& templates() {
  static const std::map<Slot, std::vector<std::string>> t = {
      {Slot::path,
       {"path", "filePath", "fileName", "configPath", "dataFile", "logFile", "outputPath",
        "env.getPath()", "env.getFilePath(i)", "env.getConfigPath()",
        "parentDir.getPath() + \"/\" + fileName"}},
      {Slot::url,
       {"url", "urlString", "baseUrl", "serverUrl", "env.getUrl()", "env.getUrlString()",
        "baseUrl + resource"}},
      {Slot::url_mixed,
       {"\"http://\" + host + \":\" + port + \"/\" + path", "\"http://\" + serverHost + \"/index.html\"",
        "\"http://example.com/\" + filePath", "\"https://\" + env.getHost() + path",
        "\"http://localhost:\" + port"}},
      {Slot::sql,
       {"query", "sql", "selectQuery", "updateSql", "env.getQuery()", "env.createQuery()",
        "\"SELECT * FROM \" + tableName"}},
      {Slot::host,
       {"host", "hostName", "serverHost", "remoteHost", "hostAddress", "env.getHost()",
        "env.getHostAddress()"}},
      {Slot::port,
       {"port", "localPort", "serverPort", "proxyPort", "env.getPort()", "env.getLocalPort()",
        "port + 1", "Integer.parseInt(portText)"}},
      {Slot::x, {"x", "left", "posX", "bounds.x", "env.getX()", "x + offset", "left + margin"}},
      {Slot::y, {"y", "top", "posY", "bounds.y", "env.getY()", "y + offset", "top + margin"}},
      {Slot::width,
       {"width", "w", "imageWidth", "maxWidth", "size.width", "env.getWidth()",
        "width - 2 * margin"}},
      {Slot::height,
       {"height", "h", "imageHeight", "maxHeight", "size.height", "env.getHeight()",
        "height - 2 * margin"}},
      {Slot::year, {"year", "startYear", "birthYear", "env.getYear()", "year - 1900"}},
      {Slot::month,
       {"month", "startMonth", "Calendar.JANUARY", "Calendar.DECEMBER", "month - 1",
        "env.getMonth()"}},
      {Slot::day, {"day", "dayOfMonth", "startDay", "env.getDay()", "Integer.parseInt(dayText)"}},
      {Slot::parent, {"parentDir", "baseDir", "workDir", "env.getTempDir()"}},
      {Slot::flag, {"append", "true", "false"}},
      {Slot::protocol, {"\"http\"", "protocol"}},
      {Slot::resource, {"resource", "\"/index.html\""}},
  };
  return t;
}

const std::map<std::string, std::string>& variable_types() {
  static const std::map<std::string, std::string> v = [] {
    std::map<std::string, std::string> m;
    for (const char* s : {"path", "filePath", "fileName", "configPath", "dataFile", "logFile",
                          "outputPath", "url", "urlString", "baseUrl", "serverUrl", "resource",
                          "query", "sql", "selectQuery", "updateSql", "tableName", "host",
                          "hostName", "serverHost", "remoteHost", "hostAddress", "portText",
                          "dayText", "protocol"})
      m[s] = "String";
    for (const char* s : {"port", "localPort", "serverPort", "proxyPort", "x", "left", "posX",
                          "y", "top", "posY", "offset", "margin", "width", "w", "imageWidth",
                          "maxWidth", "height", "h", "imageHeight", "maxHeight", "year",
                          "startYear", "birthYear", "month", "startMonth", "day", "dayOfMonth",
                          "startDay", "i"})
      m[s] = "int";
    for (const char* s : {"parentDir", "baseDir", "workDir"}) m[s] = "File";
    m["append"] = "boolean";
    m["bounds"] = "Rectangle";
    m["size"] = "Dimension";
    return m;
  }();
  return v;
}

const char* const kEnvSource = R"(package {pkg};

import java.io.File;

public class Env {
    private final String root;

    public Env() {
        this.root = System.getProperty("user.dir");
    }

    public String getPath() { return root; }
    public String getFilePath(int i) { return root + "/" + i; }
    public String getConfigPath() { return root + "/config"; }
    public File getTempDir() { return null; }
    public String getUrl() { return null; }
    public String getUrlString() { return null; }
    public String getQuery() { return null; }
    public String createQuery() { return null; }
    public String getHost() { return null; }
    public String getHostAddress() { return null; }
    public int getPort() { return 0; }
    public int getLocalPort() { return 0; }
    public int getX() { return 0; }
    public int getY() { return 0; }
    public int getWidth() { return 0; }
    public int getHeight() { return 0; }
    public int getYear() { return 0; }
    public int getMonth() { return 0; }
    public int getDay() { return 0; }
}
)";

const char* const kImports =
    "import java.awt.Dimension;\n"
    "import java.awt.Rectangle;\n"
    "import java.io.File;\n"
    "import java.io.FileInputStream;\n"
    "import java.io.FileOutputStream;\n"
    "import java.io.FileReader;\n"
    "import java.net.InetSocketAddress;\n"
    "import java.net.Socket;\n"
    "import java.net.URI;\n"
    "import java.net.URL;\n"
    "import java.sql.Connection;\n"
    "import java.sql.Statement;\n"
    "import java.time.LocalDate;\n"
    "import java.util.Calendar;\n";

const char* const kProjectNames[] = {"atlas", "borealis", "cobalt", "dunlin", "ember",
                                     "fjord", "garnet", "harbor"};

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size()))
    s.replace(at, from.size(), to);
  return s;
}

std::string snake_case(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c >= 'A' && c <= 'Z') {
      if (!out.empty()) out += '_';
      out += static_cast<char>(c - 'A' + 'a');
    } else {
      out += c;
    }
  }
  return out;
}

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_part(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

/// Renames free variables per project style and collects their declarations.
std::string bind_variables(const std::string& text, bool snake,
                           std::map<std::string, std::string>& params) {
  const auto& types = variable_types();
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '"') {
      std::size_t j = text.find('"', i + 1);
      out += text.substr(i, j - i + 1);
      i = j + 1;
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_part(text[j])) ++j;
      std::string word = text.substr(i, j - i);
      bool member = i > 0 && text[i - 1] == '.';
      auto it = types.find(word);
      if (!member && it != types.end()) {
        std::string name = snake ? snake_case(word) : word;
        params[name] = it->second;
        word = name;
      }
      out += word;
      i = j;
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

class ProjectWriter {
 public:
  ProjectWriter(std::size_t index, const GeneratorConfig& config)
      : config_(config),
        rng_(static_cast<std::uint32_t>(0x9e3779b9u * (index + 1))),
        name_(index < std::size(kProjectNames) ? kProjectNames[index]
                                              : "proj" + std::to_string(index)),
        snake_(index % 2 == 1) {
    // each project drops one spelling per c-type
    for (const auto& [slot, list] : templates()) {
      std::vector<std::string> kept = list;
      if (kept.size() >= 5) kept.erase(kept.begin() + static_cast<long>(pick(kept.size())));
      vocabulary_[slot] = std::move(kept);
    }
  }

  GeneratedProject run() {
    GeneratedProject p;
    p.name = name_;
    std::string core = name_ + ".core";
    p.files.push_back({"src/" + name_ + "/core/Env.java", replace_all(kEnvSource, "{pkg}", core)});
    std::size_t classes = (config_.sites_per_project + config_.sites_per_class - 1) /
                          std::max<std::size_t>(1, config_.sites_per_class);
    std::size_t left = config_.sites_per_project;
    for (std::size_t c = 0; c < classes; ++c) {
      std::size_t n = std::min(left, config_.sites_per_class);
      left -= n;
      std::string cls = "Worker" + std::to_string(c + 1);
      std::string pkg = name_ + (c % 2 ? ".net" : ".io");
      std::string text = "package " + pkg + ";\n\n" + kImports + "\nimport " + core + ".Env;\n\n" +
                         "public class " + cls + " {\n    private final Env env = new Env();\n";
      for (std::size_t s = 0; s < n; ++s) text += site(s + 1);
      text += "}\n";
      std::string dir = pkg.substr(pkg.find('.') + 1);
      p.files.push_back({"src/" + name_ + "/" + dir + "/" + cls + ".java", std::move(text)});
      p.call_sites += n;
    }
    return p;
  }

 private:
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  std::string argument(Slot slot) {
    if (slot == Slot::url && pick(5) < 2) slot = Slot::url_mixed;
    const auto& list = vocabulary_.at(slot);
    return list[pick(list.size())];
  }

  std::string site(std::size_t n) {
    const CallKind& kind = call_kinds()[pick(call_kinds().size())];
    std::map<std::string, std::string> params;
    std::string call = kind.text;
    for (std::size_t k = 0; k < kind.slots.size(); ++k) {
      std::string arg = bind_variables(argument(kind.slots[k]), snake_, params);
      call = replace_all(call, "{" + std::to_string(k) + "}", arg);
    }
    std::string sig;
    if (*kind.receiver) sig = kind.receiver;
    for (const auto& [name, type] : params) {
      if (!sig.empty()) sig += ", ";
      sig += type + " " + name;
    }
    return "\n    void site" + std::to_string(n) + "(" + sig + ") throws Exception {\n        " +
           call + ";\n    }\n";
  }

  const GeneratorConfig& config_;
  std::mt19937 rng_;
  std::string name_;
  bool snake_;
  std::map<Slot, std::vector<std::string>> vocabulary_;
};

}  // namespace

std::vector<GeneratedProject> generate_corpus(const GeneratorConfig& config) {
  std::vector<GeneratedProject> out;
  for (std::size_t i = 0; i < config.projects; ++i) out.push_back(ProjectWriter(i, config).run());
  return out;
}

void write_corpus(const fs::path& dir, const std::vector<GeneratedProject>& corpus) {
  fs::create_directories(dir);
  std::ofstream manifest(dir / "projects.tsv", std::ios::binary);
  for (const auto& p : corpus) {
    fs::path root = fs::absolute(dir / p.name);
    for (const auto& f : p.files) {
      fs::path file = root / f.path;
      fs::create_directories(file.parent_path());
      std::ofstream out(file, std::ios::binary);
      out << f.text;
      if (!out) throw std::runtime_error("cannot write " + file.string());
    }
    manifest << p.name << '\t' << root.generic_string() << '\n';
  }
  if (!manifest) throw std::runtime_error("cannot write " + (dir / "projects.tsv").string());
}

}  // namespace ctm
