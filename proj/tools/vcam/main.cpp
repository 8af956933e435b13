#include <iostream>

#include "vcam/workbench/cli.hpp"

int main(int argc, char** argv) { return vcam::workbench::run_cli(argc, argv, std::cout, std::cerr); }
