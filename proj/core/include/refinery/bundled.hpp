#pragma once

// Data files compiled into the library (mapping tables, blocklists, rule sets, lexicons).

#include <optional>
#include <string_view>
#include <vector>

namespace refinery::bundled {

/// Content of a bundled file by relative name, e.g. "rules/rules_web.tsv".
std::optional<std::string_view> file(std::string_view name);
std::vector<std::string_view> names();

}  // namespace refinery::bundled
