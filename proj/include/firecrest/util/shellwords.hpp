#pragma once

#include <optional>
#include <string>
#include <vector>

namespace firecrest::shellwords {

// Quotes an argument so that split(join(args)) == args. Arguments containing
// whitespace, quotes or backslashes get double-quoted with escapes.
std::string quote(const std::string& arg);
std::string join(const std::vector<std::string>& args);

// Splits a command line into arguments. Returns nullopt on unbalanced quotes.
std::optional<std::vector<std::string>> split(const std::string& line);

}  // namespace firecrest::shellwords
