#include <cstdlib>
#include <iostream>

#include "cyclepart/cli.hpp"

int main(int argc, char** argv) {
  const char* env = std::getenv(cyclepart::cli::kSeedEnv);
  return cyclepart::cli::main_entry(argc, argv, std::cout, std::cerr,
                                    env ? std::optional<std::string>(env) : std::nullopt);
}
