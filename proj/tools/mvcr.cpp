#include <iostream>

#include "mvcr/cli.hpp"

int main(int argc, char** argv) { return mvcr::cli::run(argc, argv, std::cout, std::cerr); }
