#include <iostream>

#include "histq/cli.hpp"

int main(int argc, char** argv) { return histq::cli::run(argc, argv, std::cout, std::cerr); }
