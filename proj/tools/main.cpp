#include <iostream>
#include <string>
#include <vector>

#include "vertisplit/cli.hpp"

int main(int argc, char** argv) {
    return vsplit::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
