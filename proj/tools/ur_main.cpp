#include "ur/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return ur::run_cli(argc, argv, std::cout, std::cerr);
}
