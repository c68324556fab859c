#include <iostream>

#include "membrane/scenario.hpp"

int main(int argc, char** argv) { return membrane::cli::run_cli(argc, argv, std::cout, std::cerr); }
