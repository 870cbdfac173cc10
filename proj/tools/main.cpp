#include <iostream>

#include "avgorbit/cli.hpp"

int main(int argc, char** argv) {
  return avgorbit::cli::run(argc, argv, std::cout, std::cerr);
}
