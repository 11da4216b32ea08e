#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return contextua::cli::run(argc, argv, std::cout, std::cerr); }
