#include "run_config.hpp"

#include <iostream>

int main(int argc, char** argv) { return qhosc::cli::run(argc, argv, std::cout, std::cerr); }
