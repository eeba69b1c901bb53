#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctm/ast.hpp"
#include "ctm/ctype.hpp"
#include "ctm/features.hpp"
#include "ctm/method_id.hpp"

namespace ctm {

/// One argument expression of a registry-matched call.
struct Occurrence {
  std::string project;
  std::string file;  // relative to the project root, '/' separated
  int line = 0;
  MethodId callee;
  std::size_t arg_pos = 0;
  CType label = CType::OTHER;
  std::shared_ptr<const Expr> expr;
  std::string expr_text;
  std::optional<FeatureVector> features;
};

/// Features of the occurrence's expression (recomputed, not the cached ones).
FeatureVector featurize(const Occurrence& occ, SegmentationMode mode = SegmentationMode::literal);

/// Cached features when present, computed otherwise.
FeatureVector features_of(const Occurrence& occ, SegmentationMode mode = SegmentationMode::literal);

/// Tokens of label-matching occurrences with the number of distinct projects
/// using each. Most widespread first; ties go to the word found in more
/// occurrences, then alphabetical.
std::vector<std::pair<std::string, std::size_t>> top_words(const std::vector<Occurrence>& occs,
                                                          CType label);

class OccurrenceFormatError : public std::runtime_error {
 public:
  OccurrenceFormatError(const std::string& message, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Single-line JSON object (no trailing newline).
std::string occurrence_to_json(const Occurrence& occ);
/// Parses one JSON line and re-parses expr_text into expr.
Occurrence occurrence_from_json(std::string_view line);

std::string occurrences_to_jsonl(const std::vector<Occurrence>& occs);
std::vector<Occurrence> occurrences_from_jsonl(std::string_view text);

void write_occurrences(const std::filesystem::path& file, const std::vector<Occurrence>& occs);
std::vector<Occurrence> read_occurrences(const std::filesystem::path& file);

}  // namespace ctm
