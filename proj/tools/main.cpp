#include <iostream>
#include <vector>

#include "prociter/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return prociter::cli::run(args, std::cout, std::cerr);
}
