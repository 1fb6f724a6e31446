#include <iostream>

#include "elliptail_cli/run.hpp"

int main(int argc, char** argv) { return elliptail::cli::main_entry(argc, argv, std::cout, std::cerr); }
