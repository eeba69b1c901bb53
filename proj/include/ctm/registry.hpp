#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctm/ctype.hpp"
#include "ctm/method_id.hpp"

namespace ctm {

class RegistryError : public std::runtime_error {
 public:
  RegistryError(const std::string& message, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class RegistryFormatError : public RegistryError {
 public:
  using RegistryError::RegistryError;
};

class DuplicateEntryError : public RegistryError {
 public:
  using RegistryError::RegistryError;
};

struct RegistryEntry {
  MethodId method;
  std::map<std::size_t, CType> arg_ctypes;  // zero-based position -> non-OTHER label

  /// Label of an argument position: the mapped c-type or OTHER.
  CType label_at(std::size_t pos) const;
};

/// Immutable after construction; safe for concurrent readers.
class Registry {
 public:
  Registry() = default;
  explicit Registry(std::map<std::string, RegistryEntry> entries) : entries_(std::move(entries)) {}

  const RegistryEntry* find(const MethodId& id) const;
  /// Entries keyed (and therefore ordered) by MethodId text.
  const std::map<std::string, RegistryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Number of entries mapping at least one position to each c-type.
  std::map<CType, std::size_t> methods_per_ctype() const;

 private:
  std::map<std::string, RegistryEntry> entries_;
};

/// Parses registry text: one `<MethodId> <pos>=<CTYPE> ...` row per line,
/// `#` comments. Throws RegistryFormatError or DuplicateEntryError.
Registry parse_registry(std::string_view text);
Registry load_registry(const std::filesystem::path& file);

/// Canonical text: rows sorted by MethodId text, positions ascending.
std::string serialize_registry(const Registry& registry);

/// Entry of the first registered candidate in MethodId text order.
const RegistryEntry* lookup(const Registry& registry, const std::vector<MethodId>& candidates);

/// Directory holding the bundled registry and signature list. The
/// CTM_DATA_DIR environment variable overrides the built-in location.
std::filesystem::path data_dir();
std::filesystem::path default_registry_path();
std::filesystem::path default_signatures_path();

}  // namespace ctm
