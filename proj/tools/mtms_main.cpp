#include <iostream>

#include "mtms/cli/app.hpp"

int main(int argc, char** argv) { return mtms::cli::run_cli(argc, argv, std::cout, std::cerr); }
