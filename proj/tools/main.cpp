#include <iostream>

#include "sccl/cli.hpp"

int main(int argc, char** argv) {
  return sccl::cli::run(argc, argv, std::cin, std::cout, std::cerr);
}
