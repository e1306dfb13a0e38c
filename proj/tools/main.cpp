#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return bbz::cli::main_entry(argc, argv, std::cout, std::cerr); }
