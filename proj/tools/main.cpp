#include "ergocap/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return ergocap::run_cli(argc, argv, std::cout, std::cerr);
}
