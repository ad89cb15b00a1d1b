#pragma once

#include <functional>
#include <string>

namespace dtem {

using WarningHandler = std::function<void(const std::string&)>;

// Replaces the process-wide warning sink (default: stderr). Passing an empty
// handler silences warnings. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace dtem
