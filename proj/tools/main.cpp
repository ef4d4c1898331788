#include <iostream>

#include "ltcm/cli.hpp"

int main(int argc, char** argv) { return ltcm::cli::run_cli(argc, argv, std::cout, std::cerr); }
