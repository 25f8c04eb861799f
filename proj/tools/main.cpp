#include <iostream>

#include "fprates/cli.hpp"

int main(int argc, char** argv) { return fprates::run_cli(argc, argv, std::cout, std::cerr); }
