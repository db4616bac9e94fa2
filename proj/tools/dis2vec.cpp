#include <iostream>
#include <string>
#include <vector>

#include "dis2vec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dis2vec::run(args, std::cout, std::cerr);
}
