#include <iostream>

#include "fairstakes/cli.hpp"

int main(int argc, char** argv) {
  return fairstakes::run_cli(argc, argv, std::cout, std::cerr);
}
