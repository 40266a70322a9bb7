#include <iostream>

#include "pathwise_app/cli.hpp"

int main(int argc, char** argv) {
  return pathwise::app::run_cli(argc, argv, std::cout, std::cerr);
}
