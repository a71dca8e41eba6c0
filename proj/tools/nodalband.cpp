#include <iostream>

#include "nodalband/cli.hpp"

int main(int argc, char** argv) { return nodalband::cli::main_entry(argc, argv, std::cout, std::cerr); }
