#include <iostream>

#include "hjac/cli.hpp"

int main(int argc, char** argv) { return hjac::cli::run(argc, argv, std::cout, std::cerr); }
