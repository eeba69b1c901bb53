#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ctm/extract.hpp"

namespace ctm {

/// Synthetic Java corpus whose argument expressions follow the word
/// conventions seen in real projects for each c-type (`path`/`file` for
/// PATH, `port` for PORT and so on). URL arguments are partly string
/// concatenations that embed host, port and path words.
struct GeneratorConfig {
  std::size_t projects = 4;
  std::size_t sites_per_project = 90;  // registry call statements
  std::size_t sites_per_class = 15;
};

struct GeneratedProject {
  std::string name;
  std::vector<SourceFile> files;  // paths relative to the project root
  std::size_t call_sites = 0;
};

/// Same config, same bytes.
std::vector<GeneratedProject> generate_corpus(const GeneratorConfig& config = {});

/// Writes `<dir>/<project>/<files>` and `<dir>/projects.tsv` (a project
/// manifest with absolute roots).
void write_corpus(const std::filesystem::path& dir, const std::vector<GeneratedProject>& corpus);

}  // namespace ctm
