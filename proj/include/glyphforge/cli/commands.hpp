#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace glyphforge::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `glyphforge` tool. Subcommands: preprocess, generate,
// train, evaluate, predict.
int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace glyphforge::cli
