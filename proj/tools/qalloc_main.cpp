#include <iostream>

#include "qalloc/cli.hpp"

int main(int argc, char** argv) { return qalloc::cli::run(argc, argv, std::cout, std::cerr); }
