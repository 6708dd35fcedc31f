#include <iostream>
#include <string>
#include <vector>

#include "landscape/runner.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return landscape::run_command(args, std::cout, std::cerr);
}
