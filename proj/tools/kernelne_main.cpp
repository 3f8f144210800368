#include <iostream>

#include "kne/cli.hpp"

int main(int argc, char** argv) { return kne::cli::run(argc, argv, std::cout, std::cerr); }
