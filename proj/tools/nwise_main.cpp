#include <iostream>

#include "nwise/cli.hpp"

int main(int argc, char** argv) { return nwise::cli::run(argc, argv, std::cout, std::cerr); }
