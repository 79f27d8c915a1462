#include <iostream>

#include "padexp/cli.hpp"

int main(int argc, char** argv) { return padexp::run_cli(argc, argv, std::cout, std::cerr); }
