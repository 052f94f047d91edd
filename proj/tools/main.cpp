#include <iostream>

#include "rtf/cli.hpp"

int main(int argc, char** argv) { return rtf::cli::dispatch(argc, argv, std::cout, std::cerr); }
