#include <iostream>
#include <string>
#include <vector>

#include "ndnfwd/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ndnfwd::cli::execute(args, std::cout, std::cerr);
}
