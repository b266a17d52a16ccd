#include <iostream>

#include "srflat/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return srflat::run(args, std::cout, std::cerr);
}
