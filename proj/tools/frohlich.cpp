#include <iostream>

#include "frohlich/cli/run.hpp"

int main(int argc, char** argv) { return frohlich::cli::run(argc, argv, std::cout, std::cerr); }
