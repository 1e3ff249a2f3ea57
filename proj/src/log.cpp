#include "glyphforge/log.hpp"

#include <atomic>
#include <iostream>

namespace glyphforge::log {

namespace {
std::atomic<Level> g_level{Level::Warning};

void emit(Level at, std::string_view tag, std::string_view message) {
  if (static_cast<int>(g_level.load()) < static_cast<int>(at)) return;
  std::clog << '[' << tag << "] " << message << '\n';
}
}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void warn(std::string_view message) { emit(Level::Warning, "warn", message); }
void info(std::string_view message) { emit(Level::Info, "info", message); }
void debug(std::string_view message) { emit(Level::Debug, "debug", message); }

}  // namespace glyphforge::log
