#include "dtem/log.hpp"

#include <iostream>
#include <mutex>

namespace dtem {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& sink() {
  static WarningHandler handler = [](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; };
  return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(sink_mutex());
  WarningHandler previous = std::move(sink());
  sink() = std::move(handler);
  return previous;
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(message);
}

}  // namespace dtem
