#include <iostream>

#include "overcon/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return overcon::run_cli(args, std::cout, std::cerr);
}
