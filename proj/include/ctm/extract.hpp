#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctm/ctype.hpp"
#include "ctm/features.hpp"
#include "ctm/occurrence.hpp"
#include "ctm/registry.hpp"

namespace ctm {

struct ScanOptions {
  SegmentationMode mode = SegmentationMode::literal;
  /// Signature list text merged into the package tree; nullopt loads the
  /// bundled list, an empty string disables it.
  std::optional<std::string> signatures;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct ScanResult {
  std::vector<Occurrence> occurrences;
  std::vector<std::string> diagnostics;
  std::size_t files_scanned = 0;
  std::size_t files_failed = 0;
};

struct SourceFile {
  std::string path;  // as reported in occurrences
  std::string text;
};

/// Scans in-memory sources as one project.
ScanResult scan_sources(const std::vector<SourceFile>& files, const Registry& registry,
                        const std::string& project_name, const ScanOptions& options = {});

/// Scans every *.java file below root. Throws std::filesystem::filesystem_error
/// when root is not a directory; unreadable or unparsable files are reported
/// in diagnostics and skipped.
ScanResult scan_project(const std::filesystem::path& root, const Registry& registry,
                        const std::string& project_name, const ScanOptions& options = {});

using CTypeCounts = std::array<std::size_t, kCTypeCount>;

struct CountTable {
  std::map<std::string, CTypeCounts> rows;  // by project

  CTypeCounts totals() const;
  static std::size_t sum(const CTypeCounts& c);
};

CountTable tabulate_counts(const std::vector<Occurrence>& occs);

/// `project` header plus the 13 labels and `All`; a final `Total` row.
std::string format_counts_tsv(const CountTable& table);
std::string format_counts_text(const CountTable& table);

}  // namespace ctm
