#include <iostream>

#include "sqla/harness.hpp"

int main(int argc, char** argv) { return sqla::harness::run_cli(argc, argv, std::cout, std::cerr); }
