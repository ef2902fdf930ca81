#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return counterplan::cli::run(argc, argv, std::cout, std::cerr); }
