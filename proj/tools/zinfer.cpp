#include <iostream>

#include "zinfer/cli.hpp"

int main(int argc, char** argv) { return zinfer::cli::main_entry(argc, argv, std::cout, std::cerr); }
