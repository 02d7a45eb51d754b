#include <iostream>

#include "l2field/cli.hpp"

int main(int argc, char** argv) { return l2field::run_cli(argc, argv, std::cout, std::cerr); }
