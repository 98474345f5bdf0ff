#include <iostream>

#include "phicert/cli.hpp"

int main(int argc, char** argv) { return phicert::cli::main(argc, argv, std::cout, std::cerr); }
