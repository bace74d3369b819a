#include <iostream>
#include <string>
#include <vector>

#include "moo/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return moo::cli::run(args, std::cout, std::cerr);
}
