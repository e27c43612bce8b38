#include <iostream>

#include "plaq/cli.hpp"

int main(int argc, char** argv) { return plaq::run(argc, argv, std::cout, std::cerr); }
