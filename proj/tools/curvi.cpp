#include <iostream>

#include "curvi/cli.hpp"

int main(int argc, char** argv) { return curvi::runCli(argc, argv, std::cout, std::cerr); }
