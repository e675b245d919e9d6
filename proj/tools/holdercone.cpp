#include <iostream>
#include <string>
#include <vector>

#include "holdercone/cli.hpp"

int main(int argc, char** argv) {
  return holdercone::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
