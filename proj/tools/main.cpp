#include <iostream>

#include "ibrsc/cli.hpp"

int main(int argc, char** argv) { return ibrsc::run_cli(argc, argv, std::cout, std::cerr); }
