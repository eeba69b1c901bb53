#pragma once

#include <string>
#include <vector>

namespace ctm {

using TextTable = std::vector<std::vector<std::string>>;

/// Tab-separated rows, newline terminated.
std::string format_tsv(const TextTable& rows);

/// Space-padded columns; the first column is left aligned, the rest right
/// aligned. Trailing spaces are trimmed.
std::string format_aligned(const TextTable& rows);

}  // namespace ctm
