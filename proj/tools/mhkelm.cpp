#include <iostream>

#include "mhkelm/cli.hpp"

int main(int argc, char** argv) { return mhkelm::run_cli(argc, argv, std::cout, std::cerr); }
