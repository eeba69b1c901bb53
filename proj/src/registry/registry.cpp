#include "ctm/registry.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ctm {

CType RegistryEntry::label_at(std::size_t pos) const {
  auto it = arg_ctypes.find(pos);
  return it == arg_ctypes.end() ? CType::OTHER : it->second;
}

const RegistryEntry* Registry::find(const MethodId& id) const {
  auto it = entries_.find(id.text());
  return it == entries_.end() ? nullptr : &it->second;
}

std::map<CType, std::size_t> Registry::methods_per_ctype() const {
  std::map<CType, std::size_t> out;
  for (const auto& [text, e] : entries_) {
    std::set<CType> seen;
    for (const auto& [pos, t] : e.arg_ctypes) seen.insert(t);
    for (CType t : seen) ++out[t];
  }
  return out;
}

Registry parse_registry(std::string_view text) {
  std::map<std::string, RegistryEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string id_text;
    if (!(fields >> id_text)) continue;

    RegistryEntry entry;
    std::size_t arity = 0;
    try {
      entry.method = MethodId::parse(id_text);
      arity = descriptor_arity(entry.method.descriptor);
    } catch (const std::invalid_argument& e) {
      throw RegistryFormatError(e.what(), lineno);
    }
    std::string mapping;
    while (fields >> mapping) {
      auto eq = mapping.find('=');
      if (eq == std::string::npos || eq == 0)
        throw RegistryFormatError("expected <pos>=<CTYPE>, got '" + mapping + "'", lineno);
      std::size_t pos = 0;
      auto [end, ec] = std::from_chars(mapping.data(), mapping.data() + eq, pos);
      if (ec != std::errc() || end != mapping.data() + eq)
        throw RegistryFormatError("bad argument position in '" + mapping + "'", lineno);
      auto ct = parse_ctype(std::string_view(mapping).substr(eq + 1));
      if (!ct || *ct == CType::OTHER)
        throw RegistryFormatError("unknown c-type in '" + mapping + "'", lineno);
      if (pos >= arity)
        throw RegistryFormatError("position " + std::to_string(pos) + " out of range for " +
                                      std::to_string(arity) + "-argument method",
                                  lineno);
      if (!entry.arg_ctypes.emplace(pos, *ct).second)
        throw RegistryFormatError("position " + std::to_string(pos) + " mapped twice", lineno);
    }
    if (entry.arg_ctypes.empty()) throw RegistryFormatError("no argument position mapped", lineno);
    if (!entries.emplace(id_text, std::move(entry)).second)
      throw DuplicateEntryError("duplicate method " + id_text, lineno);
  }
  return Registry(std::move(entries));
}

Registry load_registry(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open registry " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_registry(ss.str());
}

std::string serialize_registry(const Registry& registry) {
  std::string out;
  for (const auto& [text, e] : registry.entries()) {
    out += text;
    for (const auto& [pos, t] : e.arg_ctypes) {
      out += ' ';
      out += std::to_string(pos);
      out += '=';
      out += to_string(t);
    }
    out += '\n';
  }
  return out;
}

const RegistryEntry* lookup(const Registry& registry, const std::vector<MethodId>& candidates) {
  const RegistryEntry* best = nullptr;
  for (const auto& c : candidates) {
    const RegistryEntry* e = registry.find(c);
    if (e && (!best || e->method < best->method)) best = e;
  }
  return best;
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("CTM_DATA_DIR"); env && *env) return env;
  return CTM_DATA_DIR;
}

std::filesystem::path default_registry_path() { return data_dir() / "registry.txt"; }
std::filesystem::path default_signatures_path() { return data_dir() / "jdk_signatures.txt"; }

}  // namespace ctm
