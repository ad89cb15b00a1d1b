#pragma once

#include <functional>
#include <string>

namespace dtem {

inline constexpr const char* kVersion = "1.0.0";

// Seconds-scale sanity checks of an installed build; one "PASS name" or
// "FAIL name: detail" line per check. Returns the number of failures.
int run_selftest(const std::function<void(const std::string&)>& line);

}  // namespace dtem
