#pragma once

#include <string_view>

namespace glyphforge::log {

enum class Level { Quiet = 0, Warning = 1, Info = 2, Debug = 3 };

void set_level(Level level);
Level level();

void warn(std::string_view message);
void info(std::string_view message);
void debug(std::string_view message);

}  // namespace glyphforge::log
