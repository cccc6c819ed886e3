#include <iostream>

#include "drivetherm/commands.hpp"

int main(int argc, char** argv) { return drivetherm::run_cli(argc, argv, std::cout, std::cerr); }
