#include <string>
#include <vector>

#include "lll/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lll::cli::run_cli(std::move(args));
}
