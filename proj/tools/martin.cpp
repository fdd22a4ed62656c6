#include "martin/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return martin::cli::run(argc, argv, std::cout, std::cerr); }
