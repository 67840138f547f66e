#include <iostream>

#include "crystalcool/cli.hpp"

int main(int argc, char** argv) { return crystalcool::cli::run(argc, argv, std::cout, std::cerr); }
