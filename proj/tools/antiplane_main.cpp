#include <iostream>

#include "antiplane/cli.hpp"

int main(int argc, char** argv) { return antiplane::main_entry(argc, argv, std::cout, std::cerr); }
