#include <iostream>

#include "restex/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return restex::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
