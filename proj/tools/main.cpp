#include <iostream>

#include "obstacle/cli.hpp"

int main(int argc, char** argv) { return obstacle::run_cli(argc, argv, std::cout, std::cerr); }
