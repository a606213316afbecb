#include <iostream>
#include <string>
#include <vector>

#include "sonarfield/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sonarfield::cli::run(args, std::cout, std::cerr);
}
