// tmcf: clustering-based traffic-matrix prediction from the command line.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
// failure, 1 anything else.

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "tmcf/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cluster traffic-matrix flows and forecast them with one recurrent model per cluster", "tmcf"};
  app.set_version_flag("--version", TMCF_VERSION);
  app.require_subcommand(1);
  const auto run = tmcf::cli::register_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    run();
    return 0;
  } catch (const tmcf::ConfigError& e) {
    std::cerr << "tmcf: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const tmcf::NumericalError& e) {
    std::cerr << "tmcf: numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const tmcf::DataError& e) {
    std::cerr << "tmcf: data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "tmcf: " << e.what() << '\n';
    return 1;
  }
}
