#include <iostream>

#include "opintegral/cli.hpp"

int main(int argc, char** argv) { return opintegral::cli::dispatch(argc, argv, std::cout, std::cerr); }
