#include <iostream>

#include "mfploc/commands.hpp"

int main(int argc, char** argv) { return mfploc::run_cli(argc, argv, std::cout, std::cerr); }
