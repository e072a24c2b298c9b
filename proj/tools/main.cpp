#include <iostream>
#include <string>
#include <vector>

#include "expsamp/cli.hpp"

int main(int argc, char** argv) {
  return expsamp::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
