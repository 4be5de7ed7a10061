#pragma once

#include <CLI11.hpp>
#include <functional>
#include <string>
#include <vector>

namespace wavenhance::cli {

// Registers every subcommand on `app`. The selected command's body is stored
// in `action` and runs after parsing; `args` are the arguments as given, for
// the manifest.
void register_commands(CLI::App& app, const std::vector<std::string>& args,
                       std::function<int()>& action);

// Parses and runs one command line (without the program name). Returns the
// process exit status.
int run(const std::vector<std::string>& args);

}  // namespace wavenhance::cli
