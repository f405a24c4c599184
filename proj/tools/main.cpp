#include <iostream>

#include "blockade/cli.hpp"

int main(int argc, char** argv) {
  return blockade::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
