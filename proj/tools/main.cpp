#include <iostream>

#include "rankcorr/cli.hpp"

int main(int argc, char** argv) {
  return rankcorr::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
