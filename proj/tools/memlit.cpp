#include <iostream>

#include "memlit/report.hpp"

int main(int argc, char** argv) { return memlit::run_cli(argc, argv, std::cout, std::cerr); }
