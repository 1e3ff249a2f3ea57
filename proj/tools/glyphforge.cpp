#include "glyphforge/cli/commands.hpp"
int main(int argc, char** argv) { return glyphforge::cli::run(argc, argv); }
