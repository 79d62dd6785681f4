#include <iostream>

#include "lms/cli/cli.hpp"

int main(int argc, char** argv) {
  return lms::cli::main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
