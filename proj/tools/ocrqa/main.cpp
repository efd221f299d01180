#include <iostream>

#include "ocrqa/cli.hpp"

int main(int argc, char** argv) { return ocrqa::cli::run(argc, argv, std::cout, std::cerr); }
