#include <iostream>

#include "tailclust/cli.hpp"

int main(int argc, char** argv) { return tailclust::cli::run(argc, argv, std::cout, std::cerr); }
