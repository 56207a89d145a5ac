#include <iostream>
#include <string>
#include <vector>

#include "tod/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return tod::cli::run_cli(args, std::cout, std::cerr);
}
