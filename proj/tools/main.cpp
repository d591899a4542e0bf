#include "hgl/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return hgl::run_command(args, std::cout, std::cerr);
}
