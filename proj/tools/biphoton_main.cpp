#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "biphoton/cli.hpp"

int main(int argc, char** argv) {
  std::optional<std::string> env_seed;
  if (const char* s = std::getenv("BIPHOTON_SEED")) env_seed = s;
  return biphoton::cli::run(argc, argv, std::cout, std::cerr, env_seed);
}
