#pragma once

#include <functional>

namespace CLI {
class App;
}

namespace tmcf::cli {

/// Registers every subcommand on `app`. The returned callback runs the
/// subcommand selected by the parse.
std::function<void()> register_commands(CLI::App& app);

}  // namespace tmcf::cli
