#include <iostream>

#include "linkact/cli.hpp"

int main(int argc, char** argv) { return linkact::dispatch(argc, argv, std::cout, std::cerr); }
