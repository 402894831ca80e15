#include <iostream>

#include "vlcalloc/cli.hpp"

int main(int argc, char** argv) { return vlcalloc::run_cli(argc, argv, std::cout, std::cerr); }
