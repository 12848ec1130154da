#include <iostream>

#include "toruslab/cli.hpp"

int main(int argc, char** argv) { return toruslab::run_cli(argc, argv, std::cout, std::cerr); }
