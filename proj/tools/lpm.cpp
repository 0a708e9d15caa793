#include <iostream>

#include "lpm/cli/app.hpp"

int main(int argc, char** argv) { return lpm::cli::run(argc, argv, std::cout, std::cerr); }
