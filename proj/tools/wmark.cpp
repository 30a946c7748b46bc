#include <iostream>

#include "wmark/pipeline.hpp"

int main(int argc, char** argv) { return wmark::run_cli(argc, argv, std::cout, std::cerr); }
