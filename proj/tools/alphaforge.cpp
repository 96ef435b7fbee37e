#include <iostream>

#include "alphaforge/cli.hpp"

int main(int argc, char** argv) { return alphaforge::cli::run(argc, argv, std::cout, std::cerr); }
