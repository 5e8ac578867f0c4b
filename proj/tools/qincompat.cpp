#include <iostream>
#include <string>
#include <vector>

#include "qincompat/cli_app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qincompat::cli::run(args, std::cout, std::cerr);
}
