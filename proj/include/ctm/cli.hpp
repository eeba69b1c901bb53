#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ctm/features.hpp"

namespace ctm {

struct ProjectSpec {
  std::string name;
  std::filesystem::path root;
};

struct RunConfig {
  std::filesystem::path registry_path;
  std::size_t min_items = 10;
  SegmentationMode segmentation = SegmentationMode::literal;
  std::filesystem::path output_dir = ".";
  std::vector<ProjectSpec> projects;
};

/// `name=path`; throws std::invalid_argument.
ProjectSpec parse_project_spec(const std::string& text);

/// One `name<TAB>path` per line; blank lines and `#` comments skipped.
/// Relative paths are taken relative to the manifest's directory.
std::vector<ProjectSpec> read_manifest(const std::filesystem::path& file);

/// Entry point of the `ctm` tool; `args` excludes the program name.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctm
